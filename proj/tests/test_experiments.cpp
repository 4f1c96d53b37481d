#include <doctest.h>

#include <cmath>
#include <string>

#include "kslimit/errors.hpp"
#include "kslimit/experiments.hpp"
#include "oracles.hpp"

using namespace kslimit;

namespace {

SimConfig small_bump() {
    SimConfig c;
    c.cells = {64};
    c.chi = {0.5, 1.0, 2.0};
    c.dt = 1e-3;
    c.t_end = 0.2;
    c.cadence = 5;
    c.init = {InitPreset::gaussian_bump, 0.1, 5.0, 1.0, 0.0, 0.05, {0.25}};
    return c;
}

}  // namespace

TEST_CASE("sweep on constant data has zero error") {
    SweepConfig sw;
    sw.base = small_bump();
    sw.base.init = {InitPreset::constant, 1.0, 0.0, 1.0, 0.0, 0.05, {}};
    sw.lambdas = {0.1, 0.01};
    sw.comparison_times = {0.1, 0.2};
    SweepResult r = lambda_sweep(sw);
    for (const auto& le : r.per_lambda) {
        // both systems sit at the same steady state; only solver round-off remains
        CHECK(le.e_u <= 1e-12);
        CHECK(le.e_v <= 1e-12);
    }
}

TEST_CASE("single lambda sweep has no verdict") {
    SweepConfig sw;
    sw.base = small_bump();
    sw.lambdas = {0.05};
    sw.comparison_times = {0.2};
    SweepResult r = lambda_sweep(sw);
    CHECK(r.per_lambda.size() == 1);
    CHECK(std::string(to_string(r.verdict)) == "n/a");
    CHECK(r.ratio_u.empty());
}

TEST_CASE("sweep errors decrease and are deterministic") {
    SweepConfig sw;
    sw.base = small_bump();
    sw.lambdas = {0.1, 0.01, 0.001};
    sw.comparison_times = {0.1, 0.2};
    SweepResult a = lambda_sweep(sw);
    CHECK(a.verdict == Monotonicity::strictly_decreasing);
    sw.parallel = false;
    SweepResult b = lambda_sweep(sw);
    for (std::size_t i = 0; i < a.per_lambda.size(); ++i) {
        CHECK(a.per_lambda[i].e_u == b.per_lambda[i].e_u);
        CHECK(a.per_lambda[i].e_v == b.per_lambda[i].e_v);
        CHECK(a.per_lambda[i].samples.size() == 2);
    }
}

TEST_CASE("sweep validation") {
    SweepConfig sw;
    sw.base = small_bump();
    sw.lambdas = {0.01, 0.1};
    sw.comparison_times = {0.1};
    CHECK_THROWS_AS(validate(sw), ConfigError);
    sw.lambdas = {0.1};
    sw.comparison_times = {0.3};
    CHECK_THROWS_AS(validate(sw), ConfigError);
    sw.comparison_times = {0.1};
    sw.base.chi.chi0 = 10.0;  // above 2k(a+eta)^(k-1)/n = 4
    CHECK_THROWS_AS(lambda_sweep(sw), ConfigError);
}

TEST_CASE("c0 estimate") {
    Grid g = Grid::line(1.0, 256);
    C0Estimate e = estimate_c0(g, 1.0, 1);
    CHECK(e.c0 > 0.0);
    CHECK(e.c0 <= std::exp(-1.0));
    CHECK(e.probes.size() == 1);

    // the discrete kernel at t* carries exactly e^{-t*} mass per unit source
    C0Estimate coarse = estimate_c0(Grid::line(1.0, 64), 1.0, 9);
    C0Estimate fine = estimate_c0(Grid::line(1.0, 512), 1.0, 9);
    CHECK(std::abs(coarse.c0 - fine.c0) <= 0.1 * fine.c0);

    C0Estimate early = estimate_c0(g, 1e-3, 9);
    CHECK(early.c0 < 1e-3 * e.c0);

    auto p3 = c0_probe_cells(g, 3), p9 = c0_probe_cells(g, 9);
    for (std::size_t i = 0; i < p3.size(); ++i) CHECK(p3[i] == p9[i]);
    double prev = 1e300;
    for (int probes : {1, 2, 5, 9, 20}) {
        double c0 = estimate_c0(Grid::line(1.0, 128), 1.0, probes).c0;
        CHECK(c0 <= prev);
        prev = c0;
    }
    for (double m : e.probe_minima) CHECK(e.c0 <= m);

    Grid b = Grid::box(1.0, 1.0, 16, 16);
    C0Estimate e2 = estimate_c0(b, 1.0, 9);
    CHECK(e2.c0 > 0.0);
    CHECK(e2.probes.size() == 9);
    CHECK_THROWS_AS(estimate_c0(g, 0.0, 1), ConfigError);
}

TEST_CASE("boundedness probe") {
    SimConfig c = small_bump();
    BoundednessReport r = boundedness_probe(c, {0.1, 0.01, 0.001});
    CHECK_FALSE(r.any_blowup);
    CHECK(r.ratio >= 1.0);
    CHECK(r.ratio <= 2.0);

    SimConfig k = c;
    k.init = {InitPreset::constant, 1.0, 0.0, 1.0, 0.0, 0.05, {}};
    BoundednessReport rc = boundedness_probe(k, {0.1, 0.01});
    CHECK(rc.entries[0].sup_bound == doctest::Approx(rc.entries[1].sup_bound).epsilon(1e-12));
}

TEST_CASE("lyapunov probe") {
    SimConfig c = small_bump();
    c.lambda = 0.01;
    LyapunovReport r = lyapunov_probe(c, 2.0, 0.25);
    CHECK(r.bounded);
    CHECK(std::isfinite(r.sup));
    CHECK(r.r > 0.0);

    SimConfig k = c;
    k.init = {InitPreset::constant, 1.0, 0.0, 1.0, 0.0, 0.05, {}};
    LyapunovReport rk = lyapunov_probe(k, 2.0, 0.25);
    for (double v : rk.values) CHECK(v == doctest::Approx(rk.values.front()).epsilon(1e-12));

    SimConfig bad = c;
    bad.chi.chi0 = 5.0;
    CHECK_THROWS_WITH_AS(lyapunov_probe(bad, 2.0, 0.25), doctest::Contains("chi0"), ConfigError);
    SimConfig zero = c;
    zero.lambda = 0.0;
    CHECK_THROWS_AS(lyapunov_probe(zero, 2.0, 0.25), ConfigError);
}
