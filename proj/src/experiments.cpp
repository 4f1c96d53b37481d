#include "kslimit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <stdexcept>

#include <fmt/format.h>

#include "kslimit/errors.hpp"
#include "kslimit/theory.hpp"

namespace kslimit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Field difference(const Field& a, const Field& b) {
    Field d(a.grid());
    for (std::size_t c = 0; c < d.size(); ++c) d[c] = a[c] - b[c];
    return d;
}

struct TimedRun {
    RunResult result;
    double seconds = 0.0;
};

TimedRun timed_run(const SimConfig& cfg) {
    const auto start = Clock::now();
    try {
        RunResult r = run(cfg);
        if (r.blew_up) {
            throw SweepError(fmt::format("lambda = {}: blow-up flag raised at t = {}", cfg.lambda,
                                         r.blowup_time),
                             cfg.lambda, true);
        }
        return {std::move(r), seconds_since(start)};
    } catch (const RunError& e) {
        throw SweepError(fmt::format("lambda = {}: {}", cfg.lambda, e.what()), cfg.lambda);
    }
}

// Snapshot at time t; run() stores them in the order the steps pass.
const Snapshot& snapshot_at(const RunResult& r, double t, double dt) {
    const long long k = std::llround(t / dt);
    for (const Snapshot& s : r.snapshots) {
        if (std::llround(s.t / dt) == k) return s;
    }
    throw std::logic_error(fmt::format("no snapshot recorded at t = {}", t));
}

template <typename Fn>
auto map_lambdas(const std::vector<double>& lambdas, bool parallel, Fn&& fn) {
    using Out = decltype(fn(0.0));
    std::vector<Out> out;
    out.reserve(lambdas.size());
    if (!parallel) {
        for (double l : lambdas) out.push_back(fn(l));
        return out;
    }
    std::vector<std::future<Out>> pending;
    pending.reserve(lambdas.size());
    for (double l : lambdas) pending.push_back(std::async(std::launch::async, fn, l));
    // Collected in lambda order regardless of completion order.
    for (auto& f : pending) out.push_back(f.get());
    return out;
}

RunResult run_or_throw(const SimConfig& cfg) {
    try {
        return run(cfg);
    } catch (const RunError& e) {
        throw SweepError(fmt::format("lambda = {}: {}", cfg.lambda, e.what()), cfg.lambda);
    }
}

void check_below_pe_threshold(const SimConfig& base) {
    const auto th = theory::threshold_chi0_pe(base.dim, base.chi, base.eta);
    if (!(base.chi.chi0 < th.value)) {
        throw ConfigError(fmt::format(
            "chi.chi0 = {} is not below the lambda-independent threshold {} (n = {}, eta = {})",
            base.chi.chi0, th.value, base.dim, base.eta));
    }
}

}  // namespace

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::not_applicable: return "n/a";
        case Monotonicity::strictly_decreasing: return "strictly-decreasing";
        case Monotonicity::nonincreasing: return "nonincreasing";
        case Monotonicity::not_monotone: return "not-monotone";
    }
    return "unknown";
}

void validate(const SweepConfig& sw) {
    SimConfig probe = sw.base;
    probe.lambda = 0.0;
    validate(probe);
    if (sw.lambdas.empty()) throw ConfigError("sweep.lambdas must not be empty");
    for (std::size_t i = 0; i < sw.lambdas.size(); ++i) {
        if (!(sw.lambdas[i] > 0.0)) {
            throw ConfigError(fmt::format("sweep.lambdas entry {} must be > 0", sw.lambdas[i]));
        }
        if (i > 0 && !(sw.lambdas[i] < sw.lambdas[i - 1])) {
            throw ConfigError("sweep.lambdas must be strictly decreasing");
        }
    }
    if (sw.comparison_times.empty()) throw ConfigError("sweep.comparison_times must not be empty");
    for (double t : sw.comparison_times) {
        if (!(t > 0.0 && t <= sw.base.t_end * (1.0 + 1e-12))) {
            throw ConfigError(
                fmt::format("sweep.comparison_times entry {} lies outside (0, t_end]", t));
        }
    }
    if (!sw.use_linf && !sw.use_l2) throw ConfigError("sweep.norms must select linf and/or l2");
}

SweepResult lambda_sweep(const SweepConfig& sw) {
    validate(sw);
    check_below_pe_threshold(sw.base);

    SimConfig base = sw.base;
    for (double t : sw.comparison_times) base.snapshot_times.push_back(t);

    SimConfig ref_cfg = base;
    ref_cfg.lambda = 0.0;
    const TimedRun reference = timed_run(ref_cfg);

    auto one = [&](double lambda) {
        SimConfig cfg = base;
        cfg.lambda = lambda;
        TimedRun tr = timed_run(cfg);
        LambdaErrors le;
        le.lambda = lambda;
        le.runtime_seconds = tr.seconds;
        for (double t : sw.comparison_times) {
            const Snapshot& a = snapshot_at(tr.result, t, base.dt);
            const Snapshot& b = snapshot_at(reference.result, t, base.dt);
            const Field du = difference(a.u, b.u);
            const Field dv = difference(a.v, b.v);
            ErrorSample s{a.t, norm_lp(du, kInfinityNorm), norm_lp(du, 2.0),
                          norm_lp(dv, kInfinityNorm), norm_lp(dv, 2.0)};
            le.e_u = std::max(le.e_u, sw.use_linf ? s.err_u_linf : s.err_u_l2);
            le.e_v = std::max(le.e_v, sw.use_linf ? s.err_v_linf : s.err_v_l2);
            le.samples.push_back(s);
        }
        return le;
    };

    SweepResult out;
    out.reference_runtime_seconds = reference.seconds;
    out.per_lambda = map_lambdas(sw.lambdas, sw.parallel, one);

    if (out.per_lambda.size() < 2) {
        out.verdict = Monotonicity::not_applicable;
        return out;
    }
    bool strict = true;
    bool weak = true;
    for (std::size_t i = 1; i < out.per_lambda.size(); ++i) {
        const LambdaErrors& prev = out.per_lambda[i - 1];
        const LambdaErrors& cur = out.per_lambda[i];
        out.ratio_u.push_back(prev.e_u > 0.0 ? cur.e_u / prev.e_u : 0.0);
        out.ratio_v.push_back(prev.e_v > 0.0 ? cur.e_v / prev.e_v : 0.0);
        strict = strict && cur.e_u < prev.e_u && cur.e_v < prev.e_v;
        weak = weak && cur.e_u <= prev.e_u && cur.e_v <= prev.e_v;
    }
    out.verdict = strict ? Monotonicity::strictly_decreasing
                  : weak ? Monotonicity::nonincreasing
                         : Monotonicity::not_monotone;
    return out;
}

std::vector<std::size_t> c0_probe_cells(const Grid& g, int probes) {
    if (probes < 1) throw ConfigError(fmt::format("probes must be >= 1 (got {})", probes));
    const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(probes), g.size());
    std::vector<std::size_t> cells;
    auto add = [&](int i, int j) {
        const std::size_t c = g.index(i, j);
        if (cells.size() < want && std::find(cells.begin(), cells.end(), c) == cells.end()) {
            cells.push_back(c);
        }
    };
    const int nx = g.nx();
    const int ny = g.ny();
    if (g.dim() == 1) {
        add(0, 0);
        add(nx - 1, 0);
        add(nx / 2, 0);
    } else {
        add(0, 0);
        add(nx - 1, 0);
        add(0, ny - 1);
        add(nx - 1, ny - 1);
        add(nx / 2, ny / 2);
        add(nx / 2, 0);
        add(nx / 2, ny - 1);
        add(0, ny / 2);
        add(nx - 1, ny / 2);
    }
    // Halton fill (bases 2 and 3); radical inverses never depend on `want`.
    auto radical_inverse = [](unsigned n, unsigned base) {
        double inv = 1.0 / base, f = inv, x = 0.0;
        while (n > 0) {
            x += f * (n % base);
            n /= base;
            f *= inv;
        }
        return x;
    };
    for (unsigned n = 1; cells.size() < want; ++n) {
        const int i = std::min(nx - 1, static_cast<int>(radical_inverse(n, 2) * nx));
        const int j = g.dim() == 2 ? std::min(ny - 1, static_cast<int>(radical_inverse(n, 3) * ny)) : 0;
        add(i, j);
    }
    return cells;
}

C0Estimate estimate_c0(const Grid& g, double t_star, int probes, int steps) {
    if (!(t_star > 0.0) || !std::isfinite(t_star)) {
        throw ConfigError(fmt::format("t_star must be > 0 (got {})", t_star));
    }
    if (steps < 1) throw ConfigError(fmt::format("steps must be >= 1 (got {})", steps));
    C0Estimate est{g, t_star, c0_probe_cells(g, probes), {}, 0.0};

    // w_t = Lap w - w splits exactly into e^{-t} times the heat flow since
    // the identity commutes with the Laplacian.
    const double dt = t_star / steps;
    const HelmholtzOperator heat(g, 1.0 / dt);
    const double decay = std::exp(-t_star);
    for (std::size_t source : est.probes) {
        Field w(g, 0.0);
        w[source] = 1.0 / g.cell_volume();
        for (int s = 0; s < steps; ++s) {
            Field rhs(g);
            for (std::size_t c = 0; c < rhs.size(); ++c) rhs[c] = w[c] / dt;
            w = helmholtz_solve(heat, rhs, 1e-12, nullptr, &w);
        }
        const double m = w.min() * decay;
        if (!(m > 0.0)) {
            throw std::logic_error(fmt::format(
                "estimate_c0: kernel minimum {} is not positive for source cell {}", m, source));
        }
        est.probe_minima.push_back(m);
    }
    est.c0 = *std::min_element(est.probe_minima.begin(), est.probe_minima.end());
    return est;
}

BoundednessReport boundedness_probe(const SimConfig& base, const std::vector<double>& lambdas) {
    check_below_pe_threshold(base);
    BoundednessReport report;
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) throw ConfigError(fmt::format("lambda {} must be > 0", lambda));
        SimConfig cfg = base;
        cfg.lambda = lambda;
        const RunResult r = run_or_throw(cfg);
        BoundednessEntry entry{lambda, 0.0, r.blew_up, r.blowup_time};
        for (const DiagnosticsRecord& rec : r.records) {
            entry.sup_bound = std::max(entry.sup_bound, rec.linf_u + rec.w1q_v);
        }
        report.any_blowup = report.any_blowup || r.blew_up;
        report.entries.push_back(entry);
    }
    if (!report.any_blowup && !report.entries.empty()) {
        auto [lo, hi] = std::minmax_element(
            report.entries.begin(), report.entries.end(),
            [](const BoundednessEntry& a, const BoundednessEntry& b) { return a.sup_bound < b.sup_bound; });
        report.ratio = lo->sup_bound > 0.0 ? hi->sup_bound / lo->sup_bound : 0.0;
    }
    return report;
}

LyapunovReport lyapunov_probe(const SimConfig& base, double p, double eps) {
    if (!(base.lambda > 0.0)) {
        throw ConfigError("lyapunov_probe requires lambda > 0");
    }
    const theory::ConditionParams cond{p, eps, base.lambda, base.dim};
    theory::validate(cond);
    const auto printed = theory::condition_terms(cond, base.chi, base.eta);
    const auto sharp = theory::condition_terms_sharp(cond, base.chi, base.eta);
    if (!printed.holds()) {
        throw ConfigError(fmt::format(
            "condition violated: ((1-lambda+2 lambda eps)_+ p + sqrt(p f_p(lambda))) chi0 / (2(1-eps)) "
            "= {} > k (a+eta)^k = {}",
            printed.lhs, printed.rhs));
    }
    if (!sharp.holds()) {
        throw ConfigError(fmt::format(
            "condition violated: ((1-lambda+2 lambda eps)_+ p + sqrt(p f_p(lambda))) chi0 / (2(1-eps)) "
            "= {} > k (a+eta)^(k-1) = {}",
            sharp.lhs, sharp.rhs));
    }

    SimConfig cfg = base;
    cfg.lyapunov_p = p;
    cfg.lyapunov_eps = eps;
    const RunResult r = run_or_throw(cfg);

    LyapunovReport report;
    report.r = theory::r_value(cond, base.chi);
    for (const DiagnosticsRecord& rec : r.records) {
        report.times.push_back(rec.t);
        report.values.push_back(rec.lyapunov);
        report.sup = std::max(report.sup, rec.lyapunov);
    }

    // Least-squares line through the trailing half of the records.
    const std::size_t n = report.times.size();
    const std::size_t first = n / 2;
    const std::size_t m = n - first;
    if (m >= 3) {
        double tm = 0.0, ym = 0.0;
        for (std::size_t i = first; i < n; ++i) {
            tm += report.times[i];
            ym += report.values[i];
        }
        tm /= m;
        ym /= m;
        double stt = 0.0, sty = 0.0;
        for (std::size_t i = first; i < n; ++i) {
            stt += (report.times[i] - tm) * (report.times[i] - tm);
            sty += (report.times[i] - tm) * (report.values[i] - ym);
        }
        report.slope = sty / stt;
        double sse = 0.0;
        for (std::size_t i = first; i < n; ++i) {
            const double e = report.values[i] - (ym + report.slope * (report.times[i] - tm));
            sse += e * e;
        }
        report.slope_sigma = std::sqrt(sse / static_cast<double>(m - 2) / stt);
    }
    report.bounded = std::isfinite(report.sup) && !r.blew_up &&
                     report.slope <= 3.0 * report.slope_sigma;
    return report;
}

}  // namespace kslimit
