// Acceptance run: one line per criterion, nonzero exit if any fails.
// Usage: kslimit_acceptance [output-dir]   (artifacts are written there if given)

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "kslimit/dynamics.hpp"
#include "kslimit/experiments.hpp"
#include "kslimit/io.hpp"
#include "kslimit/mesh.hpp"
#include "kslimit/theory.hpp"
#include "kslimit/verify.hpp"

using namespace kslimit;
using std::numbers::pi;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    fmt::print("[{}] {}: {}\n", ok ? "PASS" : "FAIL", name, detail);
    std::fflush(stdout);
    if (!ok) ++failures;
}

// chi0 at half the lambda-independent threshold with the conservative eta = 0
SimConfig bump_scenario() {
    SimConfig c;
    c.dim = 1;
    c.extents = {1.0};
    c.cells = {512};
    c.chi = {1.0, 1.0, 2.0};
    c.chi.chi0 = 0.5 * theory::threshold_chi0_pe(1, c.chi, 0.0).value;
    c.dt = 1e-4;
    c.t_end = 1.0;
    c.cadence = 10;
    c.init = {InitPreset::gaussian_bump, 0.1, 5.0, 1.0, 0.0, 0.05, {0.25}};
    return c;
}

const std::vector<double> kLadder{1e-1, 1e-2, 1e-3, 1e-4};

void theory_suite() {
    auto rep = verify::run_all();
    bool ok = rep.all_passed();
    std::string detail = fmt::format("seed {}", rep.seed);
    for (const auto& p : rep.properties) {
        detail += fmt::format("; {} {} ({} checks)", p.passed ? "ok" : "FAILED", p.name, p.checks);
        if (!p.passed) detail += " " + p.detail;
    }
    report(ok, "theory property suite", detail);
}

double mms_lap(int n) {
    Grid g = Grid::line(1.0, n);
    Field f(g);
    for (int i = 0; i < n; ++i) f[i] = std::cos(pi * g.x_center(i));
    Field lap = laplacian_apply(g, f);
    double e = 0.0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(lap[i] + pi * pi * f[i]));
    return e;
}

double mms_helmholtz(int n) {
    Grid g = Grid::line(1.0, n);
    Field rhs(g);
    for (int i = 0; i < n; ++i) rhs[i] = (1.0 + pi * pi) * std::cos(pi * g.x_center(i));
    Field w = helmholtz_solve(HelmholtzOperator(g, 1.0), rhs, 1e-10);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = w[i] - std::cos(pi * g.x_center(i));
        e += d * d / n;
    }
    return std::sqrt(e);
}

void discretization() {
    double l[3], h[3];
    int ns[3] = {128, 256, 512};
    for (int k = 0; k < 3; ++k) {
        l[k] = mms_lap(ns[k]);
        h[k] = mms_helmholtz(ns[k]);
    }
    double r[4] = {l[0] / l[1], l[1] / l[2], h[0] / h[1], h[1] / h[2]};
    bool ok = true;
    for (double x : r) ok = ok && x >= 3.5 && x <= 4.5;
    report(ok, "manufactured-solution convergence",
           fmt::format("laplacian max-error ratios {:.4f} {:.4f}; helmholtz L2-error ratios {:.4f} {:.4f}",
                       r[0], r[1], r[2], r[3]));
}

void conservation_and_lower_bound(const std::filesystem::path& out) {
    SimConfig c = bump_scenario();
    c.lambda = 1e-2;
    RunResult res = run(c);
    SimState init = init_state(c);

    // direct summation of the initial and final densities
    auto total = [](const Field& f) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
        return static_cast<double>(s) * f.grid().cell_volume();
    };
    const double m0 = total(init.u);
    double drift = std::abs(total(res.final_state.u) - m0) / m0;
    for (const auto& rec : res.records) drift = std::max(drift, std::abs(rec.mass - m0) / m0);

    double worst = 0.0;
    for (double lambda : {0.0, 1e-3, 1e-1, 1.0}) {
        SimConfig k = c;
        k.lambda = lambda;
        k.cadence = 1000;
        k.init = {InitPreset::constant, 0.8, 0.0, 0.8, 0.0, 0.05, {}};
        RunResult kr = run(k);
        for (std::size_t i = 0; i < kr.final_state.u.size(); ++i) {
            worst = std::max(worst, std::abs(kr.final_state.u[i] - 0.8));
            worst = std::max(worst, std::abs(kr.final_state.v[i] - 0.8));
        }
        if (kr.blew_up || kr.steps != 10000) worst = INFINITY;
    }
    report(!res.blew_up && drift <= 1e-9 && worst <= 1e-12, "conservation and steady state",
           fmt::format("bump run (lambda = 0.01): max relative mass drift {:.3e}; constant data after "
                       "10^4 steps, max |change| over lambda in {{0, 1e-3, 1e-1, 1}} = {:.3e}",
                       drift, worst));

    C0Estimate c0 = estimate_c0(c.grid(), 1.0, 9);
    const double eta = theory::eta_closed_form({c0.c0, m0, init.v.min()});
    double lowest = INFINITY, at = 0.0;
    for (const auto& rec : res.records) {
        if (rec.t < 10 * c.dt - 1e-15) continue;
        if (rec.min_v < lowest) { lowest = rec.min_v; at = rec.t; }
    }
    report(!res.records.empty() && lowest >= 0.95 * eta, "signal lower bound",
           fmt::format("c0 = {:.6f}, mass = {:.6f}, eta = {:.6f}; min over recorded t >= 10 dt of min_v = "
                       "{:.6f} at t = {:.4f}",
                       c0.c0, m0, eta, lowest, at));

    if (!out.empty()) io::write_file(out / "diagnostics.csv", io::diagnostics_csv(res.records));
}

SweepConfig sweep_config() {
    SweepConfig sw;
    sw.base = bump_scenario();
    sw.lambdas = kLadder;
    sw.comparison_times = {0.5, 1.0};
    return sw;
}

std::string e_columns(const SweepResult& r) {
    std::string s;
    for (const auto& le : r.per_lambda) s += fmt::format("{:.17g},{:.17g};", le.e_u, le.e_v);
    return s;
}

void fast_diffusion_limit_and_determinism(const std::filesystem::path& out) {
    const SweepConfig sw = sweep_config();
    auto t0 = std::chrono::steady_clock::now();
    SweepResult a = lambda_sweep(sw);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool strict = true;
    for (std::size_t i = 1; i < a.per_lambda.size(); ++i) {
        strict = strict && a.per_lambda[i].e_u < a.per_lambda[i - 1].e_u &&
                 a.per_lambda[i].e_v < a.per_lambda[i - 1].e_v;
    }
    const auto& first = a.per_lambda.front();
    const auto& last = a.per_lambda.back();
    const double fu = last.e_u / first.e_u, fv = last.e_v / first.e_v;
    std::string table;
    for (const auto& le : a.per_lambda) table += fmt::format(" [{:g}: {:.3e} {:.3e}]", le.lambda, le.e_u, le.e_v);
    report(strict && fu <= 0.05 && fv <= 0.05 && seconds <= 120.0, "fast signal diffusion limit",
           fmt::format("E_u, E_v per lambda:{}; E(1e-4)/E(1e-1) = {:.3e} (u), {:.3e} (v); {:.1f} s",
                       table, fu, fv, seconds));

    SweepResult b = lambda_sweep(sw);
    const std::string csv_a = io::sweep_csv(a), csv_b = io::sweep_csv(b);
    const bool same = csv_a == csv_b && e_columns(a) == e_columns(b);
    report(same, "determinism",
           fmt::format("repeated sweep: sweep.csv {} ({} bytes), E columns {}",
                       csv_a == csv_b ? "bit-identical" : "DIFFERS", csv_a.size(),
                       e_columns(a) == e_columns(b) ? "bit-identical" : "DIFFER"));

    if (!out.empty()) {
        io::write_file(out / "sweep.csv", csv_a);
        io::write_file(out / "summary.csv", io::summary_csv(a));
    }
}

void uniform_bound() {
    BoundednessReport r = boundedness_probe(bump_scenario(), kLadder);
    std::string table;
    for (const auto& e : r.entries) table += fmt::format(" [{:g}: {:.6f}]", e.lambda, e.sup_bound);

    // The sup over all t sits at t = 0 (shared initial data), so also compare
    // the sup after the initial layer, t >= 0.1.
    double lo = INFINITY, hi = 0.0;
    std::string late;
    for (double lambda : kLadder) {
        SimConfig c = bump_scenario();
        c.lambda = lambda;
        RunResult res = run(c);
        double sup = 0.0;
        for (const auto& rec : res.records)
            if (rec.t >= 0.1) sup = std::max(sup, rec.linf_u + rec.w1q_v);
        if (res.blew_up) sup = INFINITY;
        lo = std::min(lo, sup);
        hi = std::max(hi, sup);
        late += fmt::format(" [{:g}: {:.6f}]", lambda, sup);
    }
    const double late_ratio = hi / lo;
    report(!r.any_blowup && r.ratio >= 1.0 && r.ratio <= 2.0 && late_ratio <= 2.0,
           "uniform-in-lambda boundedness",
           fmt::format("sup_t(|u|_inf + |v|_W1q) per lambda:{}; max/min = {:.6f}; restricted to t >= 0.1:{}; "
                       "max/min = {:.6f}",
                       table, r.ratio, late, late_ratio));
}

void lyapunov() {
    // chi0 = 0.5 satisfies the condition for (p, eps, lambda) = (2, 0.25, 0.01)
    // in both exponent forms; the sweep's chi0 = 2 does not.
    SimConfig c = bump_scenario();
    c.chi.chi0 = 0.5;
    c.lambda = 1e-2;
    const theory::ConditionParams cond{2.0, 0.25, c.lambda, c.dim};
    const bool adm = theory::admissible(cond, c.chi, c.eta);
    LyapunovReport r = lyapunov_probe(c, cond.p, cond.eps);
    report(adm && r.bounded && std::isfinite(r.sup) && r.slope <= 3.0 * r.slope_sigma,
           "lyapunov boundedness",
           fmt::format("p = 2, eps = 0.25, lambda = 0.01, chi0 = 0.5, r = {:.6f}; sup = {:.6f}, trailing-half "
                       "slope = {:.3e} +- {:.3e}",
                       r.r, r.sup, r.slope, r.slope_sigma));
}

template <class F>
void guarded(const char* name, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(false, name, fmt::format("threw: {}", e.what()));
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path out;
    if (argc > 1) {
        out = argv[1];
        std::filesystem::create_directories(out);
    }
    guarded("theory property suite", theory_suite);
    guarded("manufactured-solution convergence", discretization);
    guarded("conservation and steady state / signal lower bound", [&] { conservation_and_lower_bound(out); });
    guarded("fast signal diffusion limit / determinism", [&] { fast_diffusion_limit_and_determinism(out); });
    guarded("uniform-in-lambda boundedness", uniform_bound);
    guarded("lyapunov boundedness", lyapunov);
    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
