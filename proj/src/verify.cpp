#include "kslimit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace kslimit::verify {

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// (lo, hi]: the left end is excluded.
double uniform_open_left(Rng& rng, double lo, double hi) { return hi - uniform(rng, 0.0, hi - lo); }

// (lo, hi): both ends excluded.
double uniform_open(Rng& rng, double lo, double hi) {
    double x = lo;
    while (x <= lo || x >= hi) x = uniform(rng, lo, hi);
    return x;
}

enum Stream : std::uint64_t {
    kFPoly = 1,
    kDiscriminant,
    kSign,
    kPhi,
    kEta,
    kThreshold,
    kLyapunov,
};

PropertyResult check_f_poly(Rng& rng, int draws, const Formulas& f) {
    PropertyResult res{"f_poly > 0 (p in (1,50], eps in (0,1/2), lambda in [0,10])"};
    for (int i = 0; i < draws; ++i) {
        const theory::ConditionParams c{uniform_open_left(rng, 1.0, 50.0), uniform_open(rng, 0.0, 0.5),
                                        uniform(rng, 0.0, 10.0), 2};
        const double v = f.f_poly(c);
        ++res.checks;
        if (!(v > 0.0)) {
            res.passed = false;
            res.detail = fmt::format("p={} eps={} lambda={} -> f_poly={}", c.p, c.eps, c.lambda, v);
            return res;
        }
    }
    res.detail = fmt::format("{} draws", res.checks);
    return res;
}

PropertyResult check_discriminant(Rng& rng, int draws, const Formulas& f) {
    PropertyResult res{"f_discriminant < 0 for p > 1, -> 0 as p -> 1+"};
    for (int i = 0; i < draws; ++i) {
        const double p = uniform_open_left(rng, 1.0, 50.0);
        const double eps = uniform_open(rng, 0.0, 0.5);
        const double d = f.f_discriminant(p, eps);
        ++res.checks;
        if (!(d < 0.0)) {
            res.passed = false;
            res.detail = fmt::format("p={} eps={} -> D={}", p, eps, d);
            return res;
        }
    }
    // Limit at p = 1: |D| shrinks linearly in p - 1.
    for (double eps : {0.01, 0.25, 0.49}) {
        double prev = -INFINITY;
        for (double gap : {1e-2, 1e-4, 1e-6, 1e-8}) {
            const double d = f.f_discriminant(1.0 + gap, eps);
            ++res.checks;
            if (!(d < 0.0) || !(d > prev) || !(std::abs(d) < 64.0 * gap)) {
                res.passed = false;
                res.detail = fmt::format("p=1+{} eps={} -> D={} (previous {})", gap, eps, d, prev);
                return res;
            }
            prev = d;
        }
    }
    res.detail = fmt::format("{} checks", res.checks);
    return res;
}

struct SignSample {
    theory::ConditionParams cond;
    ChiParams chi;
    double eta;
};

SignSample draw_sign_base(Rng& rng) {
    SignSample s;
    s.cond = {uniform_open_left(rng, 1.0, 6.0), uniform_open(rng, 0.0, 0.5), uniform_open_left(rng, 0.0, 5.0), 2};
    s.chi.k = uniform_open_left(rng, 1.0, 4.0);
    do {
        s.chi.a = uniform(rng, 0.0, 2.0);
        s.eta = uniform(rng, 0.0, 2.0);
    } while (s.chi.a + s.eta < 0.05);
    s.chi.chi0 = 1.0;
    return s;
}

PropertyResult check_sign(Rng& rng, int sets, int grid_points, const Formulas& f, Report& report) {
    PropertyResult res{"H_{r,eps}(s) <= 1e-12 on [eta, eta+1e4] for admissible sets, r = r_value"};
    // Offsets above eta: 0 followed by a geometric ladder from 1e-6 to 1e4.
    std::vector<double> offsets{0.0};
    for (int j = 0; j + 1 < grid_points; ++j) {
        offsets.push_back(1e-6 * std::pow(1e10, static_cast<double>(j) / (grid_points - 2)));
    }

    auto max_h = [&](const SignSample& s, double r) {
        double worst = -INFINITY;
        double at = s.eta;
        for (double off : offsets) {
            const double h = f.h_sign(s.eta + off, s.cond, s.chi, s.eta, r);
            if (h > worst || std::isnan(h)) {
                worst = h;
                at = s.eta + off;
            }
        }
        return std::pair{worst, at};
    };

    int accepted = 0;
    while (accepted < sets) {
        SignSample s = draw_sign_base(rng);
        const double lhs_per_chi0 = theory::condition_terms(s.cond, s.chi, s.eta).lhs;
        const double rhs = std::min(s.chi.k * std::pow(s.chi.a + s.eta, s.chi.k),
                                    s.chi.k * std::pow(s.chi.a + s.eta, s.chi.k - 1.0));
        s.chi.chi0 = uniform(rng, 0.05, 0.99) * rhs / lhs_per_chi0;
        if (!theory::admissible(s.cond, s.chi, s.eta)) continue;
        ++accepted;
        const double r = theory::r_value(s.cond, s.chi);
        const auto [worst, at] = max_h(s, r);
        res.checks += static_cast<long long>(offsets.size());
        if (!(worst <= 1e-12)) {
            res.passed = false;
            res.detail = fmt::format(
                "p={} eps={} lambda={} chi0={} a={} k={} eta={} r={}: H({}) = {}", s.cond.p,
                s.cond.eps, s.cond.lambda, s.chi.chi0, s.chi.a, s.chi.k, s.eta, r, at, worst);
            return res;
        }
    }

    // Informational sweep of sets that satisfy only the k-exponent form.
    for (int i = 0; i < sets; ++i) {
        SignSample s = draw_sign_base(rng);
        if (s.chi.a + s.eta <= 1.0) s.eta += 1.0;
        const double lhs_per_chi0 = theory::condition_terms(s.cond, s.chi, s.eta).lhs;
        const double lo = s.chi.k * std::pow(s.chi.a + s.eta, s.chi.k - 1.0);
        const double hi = s.chi.k * std::pow(s.chi.a + s.eta, s.chi.k);
        s.chi.chi0 = uniform(rng, lo, hi) / lhs_per_chi0;
        if (!theory::condition_ass_pp(s.cond, s.chi, s.eta) ||
            theory::condition_ass_pp_sharp(s.cond, s.chi, s.eta)) {
            continue;
        }
        ++report.printed_only_sets;
        if (max_h(s, theory::r_value(s.cond, s.chi)).first > 1e-12) ++report.printed_only_positive_h;
    }
    res.detail = fmt::format("{} admissible sets x {} s-values", sets, offsets.size());
    return res;
}

PropertyResult check_phi(Rng& rng, int draws, const Formulas& f) {
    PropertyResult res{"phi_r closed form = quadrature (1e-10 rel), monotone, within its floor and 1"};
    using boost::math::quadrature::gauss_kronrod;
    for (int i = 0; i < draws; ++i) {
        ChiParams chi{1.0, uniform(rng, 0.0, 2.0), uniform_open_left(rng, 1.0, 4.0)};
        double eta = uniform(rng, 0.0, 2.0);
        if (chi.a + eta < 0.05) eta += 0.05;
        const double r = uniform(rng, 0.0, 5.0);
        const double s = eta + uniform(rng, 0.0, 50.0);
        const double integral = gauss_kronrod<double, 61>::integrate(
            [&](double sigma) { return std::pow(chi.a + sigma, -chi.k); }, eta, s, 30, 1e-13);
        const double expected = std::exp(-r * integral);
        const double got = f.phi_r(s, r, chi, eta);
        ++res.checks;
        if (!(std::abs(got - expected) <= 1e-10 * std::abs(expected))) {
            res.passed = false;
            res.detail = fmt::format("r={} a={} k={} eta={} s={}: closed form {} vs quadrature {}", r,
                                     chi.a, chi.k, eta, s, got, expected);
            return res;
        }
        // Monotone and bounded along a ladder of s values.
        const double floor = theory::phi_r_floor(r, chi, eta);
        double prev = 1.0;
        for (double off : {0.0, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e6}) {
            const double v = f.phi_r(eta + off, r, chi, eta);
            ++res.checks;
            // The floor and the closed form round differently once r * integral is large.
            if (!(v <= prev) || !(v <= 1.0) || !(v >= floor * (1.0 - 1e-12))) {
                res.passed = false;
                res.detail = fmt::format("r={} a={} k={} eta={} s={}: phi={} (prev {}, floor {})", r,
                                         chi.a, chi.k, eta, eta + off, v, prev, floor);
                return res;
            }
            prev = v;
        }
    }
    res.detail = fmt::format("{} checks", res.checks);
    return res;
}

// sup over tau of min{e^{-2tau} vmin, cm (1 - e^{-tau})} by nested grid search.
double eta_by_tau_grid(double vmin, double cm) {
    auto objective = [&](double tau) {
        return std::min(std::exp(-2.0 * tau) * vmin, cm * -std::expm1(-tau));
    };
    constexpr int kPoints = 2000;
    double lo = std::log(1e-12), hi = std::log(60.0);
    double best = 0.0;
    double best_tau = 0.0;
    // Logarithmic grid first, then linear refinement around the best cell.
    for (int i = 0; i <= kPoints; ++i) {
        const double tau = std::exp(lo + (hi - lo) * i / kPoints);
        if (const double v = objective(tau); v > best) {
            best = v;
            best_tau = tau;
        }
    }
    double width = best_tau * (std::exp((hi - lo) / kPoints) - 1.0) * 2.0;
    for (int pass = 0; pass < 4; ++pass) {
        const double a = std::max(best_tau - width, 0.0);
        const double b = best_tau + width;
        for (int i = 0; i <= kPoints; ++i) {
            const double tau = a + (b - a) * i / kPoints;
            if (tau <= 0.0) continue;
            if (const double v = objective(tau); v > best) {
                best = v;
                best_tau = tau;
            }
        }
        width = 2.0 * (b - a) / kPoints;
    }
    return best;
}

PropertyResult check_eta(Rng& rng, int draws, const Formulas& f) {
    PropertyResult res{"eta closed form = brute-force tau-grid maximum (1e-6)"};
    for (int i = 0; i < draws; ++i) {
        const double c0 = uniform_open_left(rng, 0.0, 1.0);
        const double mass = uniform_open_left(rng, 0.0, 10.0);
        const double vmin = i % 10 == 0 ? 0.0 : uniform(rng, 0.0, 100.0);
        const double closed = f.eta_closed_form({c0, mass, vmin});
        const double brute = eta_by_tau_grid(vmin, c0 * mass);
        ++res.checks;
        if (!(std::abs(closed - brute) <= 1e-6 * std::max(1.0, brute))) {
            res.passed = false;
            res.detail = fmt::format("c0={} m={} vmin={}: closed {} vs grid {}", c0, mass, vmin,
                                     closed, brute);
            return res;
        }
    }
    res.detail = fmt::format("{} draws", res.checks);
    return res;
}

PropertyResult check_threshold(Rng& rng, int draws) {
    PropertyResult res{"threshold_chi0_pp(lambda=0) == threshold_chi0_pe bit for bit"};
    for (int i = 0; i < draws; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 10)(rng);
        const ChiParams chi{1.0, uniform(rng, 0.0, 3.0), uniform_open_left(rng, 1.0, 5.0)};
        const double eta = uniform(rng, 0.0, 3.0);
        const double pp = theory::threshold_chi0_pp(n, 0.0, chi, eta).value;
        const double pe = theory::threshold_chi0_pe(n, chi, eta).value;
        ++res.checks;
        if (pp != pe) {
            res.passed = false;
            res.detail = fmt::format("n={} a={} k={} eta={}: pp={:.17g} pe={:.17g}", n, chi.a, chi.k,
                                     eta, pp, pe);
            return res;
        }
    }
    res.detail = fmt::format("{} draws", res.checks);
    return res;
}

PropertyResult check_lyapunov(Rng& rng, int draws) {
    PropertyResult res{"Lyapunov functional within the phi_r sandwich of ||u||_p^p"};
    const Grid g = Grid::line(1.0, 16);
    for (int i = 0; i < draws; ++i) {
        const ChiParams chi{1.0, uniform(rng, 0.1, 2.0), uniform_open_left(rng, 1.0, 4.0)};
        const double eta = uniform(rng, 0.0, 1.0);
        const double p = uniform_open_left(rng, 1.0, 4.0);
        const double r = uniform(rng, 0.0, 5.0);
        Field u(g), v(g);
        for (std::size_t c = 0; c < g.size(); ++c) {
            u[c] = uniform(rng, 0.0, 3.0);
            v[c] = eta + uniform(rng, 0.0, 20.0);
        }
        const double value = theory::lyapunov_functional(u, v, p, r, chi, eta).value;
        const double lp = std::pow(norm_lp(u, p), p);
        const double floor = theory::phi_r_floor(r, chi, eta);
        ++res.checks;
        if (!(value <= lp * (1.0 + 1e-12)) || !(value >= floor * lp * (1.0 - 1e-12))) {
            res.passed = false;
            res.detail = fmt::format("p={} r={} a={} k={} eta={}: value {} outside [{}, {}]", p, r,
                                     chi.a, chi.k, eta, value, floor * lp, lp);
            return res;
        }
    }
    res.detail = fmt::format("{} draws", res.checks);
    return res;
}

// Exceptions thrown by a formula are reported as a failed property.
template <typename Fn>
PropertyResult guarded(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {name, false, 0, fmt::format("exception: {}", e.what())};
    }
}

}  // namespace

bool Report::all_passed() const {
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyResult& p) { return p.passed; });
}

Report run_all(std::uint64_t seed, const Sizes& sizes, const Formulas& formulas) {
    Report report;
    report.seed = seed;
    auto rng = [&](Stream s) { return make_rng(seed, s); };

    Rng r1 = rng(kFPoly);
    report.properties.push_back(
        guarded("f_poly", [&] { return check_f_poly(r1, sizes.f_poly_draws, formulas); }));
    Rng r2 = rng(kDiscriminant);
    report.properties.push_back(guarded(
        "discriminant", [&] { return check_discriminant(r2, sizes.discriminant_draws, formulas); }));
    Rng r3 = rng(kSign);
    report.properties.push_back(guarded("sign", [&] {
        return check_sign(r3, sizes.sign_parameter_sets, sizes.sign_grid_points, formulas, report);
    }));
    Rng r4 = rng(kPhi);
    report.properties.push_back(
        guarded("phi_r", [&] { return check_phi(r4, sizes.phi_draws, formulas); }));
    Rng r5 = rng(kEta);
    report.properties.push_back(
        guarded("eta", [&] { return check_eta(r5, sizes.eta_draws, formulas); }));
    Rng r6 = rng(kThreshold);
    report.properties.push_back(
        guarded("threshold", [&] { return check_threshold(r6, sizes.threshold_draws); }));
    Rng r7 = rng(kLyapunov);
    report.properties.push_back(
        guarded("lyapunov", [&] { return check_lyapunov(r7, sizes.lyapunov_draws); }));
    return report;
}

std::vector<std::pair<double, double>> sample_sequence(std::uint64_t seed, int count) {
    Rng rng = make_rng(seed, kDiscriminant);
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < count; ++i) {
        const double p = uniform_open_left(rng, 1.0, 50.0);
        const double eps = uniform_open(rng, 0.0, 0.5);
        out.emplace_back(p, eps);
    }
    return out;
}

}  // namespace kslimit::verify
