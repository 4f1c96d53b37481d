#include <doctest.h>

#include <cmath>
#include <random>

#include "kslimit/dynamics.hpp"
#include "kslimit/errors.hpp"
#include "oracles.hpp"

using namespace kslimit;

namespace {

SimConfig bump(int cells = 128, double t_end = 0.1) {
    SimConfig c;
    c.cells = {cells};
    c.chi = {2.0, 1.0, 2.0};
    c.dt = 1e-3;
    c.t_end = t_end;
    c.cadence = 10;
    c.init = {InitPreset::gaussian_bump, 0.1, 5.0, 1.0, 0.0, 0.05, {0.25}};
    return c;
}

SimConfig constant(double lambda) {
    SimConfig c;
    c.cells = {64};
    c.lambda = lambda;
    c.dt = 1e-2;
    c.t_end = 0.5;
    c.chi = {1.5, 1.0, 2.0};
    c.init = {InitPreset::constant, 1.3, 0.0, 1.3, 0.0, 0.05, {}};
    return c;
}

}  // namespace

TEST_CASE("initial data presets") {
    SimState s = init_state(constant(0.0));
    CHECK(s.u.min() == 1.3);
    CHECK(s.v.max() == 1.3);

    SimConfig b = bump(512);
    b.init.center = {};
    SimState sb = init_state(b);
    double mass = 0.1 + 5.0 * oracle::truncated_gaussian(0.5, 0.05, 1.0);
    CHECK(sb.u.integral() == doctest::Approx(mass).epsilon(1e-6));
    CHECK(sb.u.min() > 0.0);

    SimConfig z = constant(0.0);
    z.chi.a = 0.0;
    z.init.v_base = 0.0;
    CHECK_THROWS_AS(init_state(z), ConfigError);
    SimConfig amp = constant(0.0);
    amp.init.u_amp = 1.0;
    CHECK_THROWS_AS(validate(amp), ConfigError);
    SimConfig frac = constant(0.0);
    frac.dt = 0.3;
    CHECK_THROWS_AS(validate(frac), ConfigError);
}

TEST_CASE("constant state is a fixed point") {
    for (double lambda : {0.0, 1e-3, 1e-1, 1.0, 10.0}) {
        SimConfig c = constant(lambda);
        SimState s = init_state(c);
        SimState n = step(s, c);
        CHECK(oracle::max_abs_diff(n.u, s.u) <= 1e-12);
        CHECK(oracle::max_abs_diff(n.v, s.v) <= 1e-12);
        CHECK(n.t == c.dt);
        RunResult r = run(c);
        CHECK(oracle::max_abs_diff(r.final_state.u, s.u) <= 1e-12);
        for (const auto& rec : r.records) {
            CHECK(rec.max_u == doctest::Approx(1.3).epsilon(1e-12));
            CHECK(rec.min_v == doctest::Approx(1.3).epsilon(1e-12));
        }
    }
}

TEST_CASE("elliptic residual on the lambda = 0 path") {
    SimConfig c = bump(128, 0.02);
    c.lambda = 0.0;
    Stepper stepper(c);
    SimState s = init_state(c);
    HelmholtzOperator op(c.grid(), 1.0);
    for (int k = 0; k < 10; ++k) {
        SimState n = stepper.step(s);
        Field r = op.apply(n.v);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            num += (r[i] - s.u[i]) * (r[i] - s.u[i]);
            den += s.u[i] * s.u[i];
        }
        CHECK(std::sqrt(num / den) <= c.solver_tol);
        s = n;
    }
}

TEST_CASE("mass is conserved") {
    for (double lambda : {0.0, 0.01, 1.0}) {
        SimConfig c = bump(256, 0.2);
        c.lambda = lambda;
        RunResult r = run(c);
        REQUIRE_FALSE(r.blew_up);
        double m0 = r.records.front().mass;
        for (const auto& rec : r.records) CHECK(std::abs(rec.mass - m0) <= 1e-10 * m0);
    }
    // random admissible state, one step
    SimConfig c = bump(64);
    c.lambda = 0.5;
    SimState s = init_state(c);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(0.1, 2.0);
    for (std::size_t i = 0; i < s.u.size(); ++i) { s.u[i] = d(rng); s.v[i] = d(rng); }
    SimState n = step(s, c);
    CHECK(oracle::weighted_sum(n.u) == doctest::Approx(oracle::weighted_sum(s.u)).epsilon(1e-10));
}

TEST_CASE("first order in time") {
    auto final_u = [](double dt) {
        SimConfig c = bump(128, 0.05);
        c.lambda = 0.1;
        c.dt = dt;
        return run(c).final_state.u;
    };
    Field a = final_u(1e-3), b = final_u(5e-4), c = final_u(2.5e-4);
    double ratio = oracle::max_abs_diff(a, b) / oracle::max_abs_diff(b, c);
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
}

TEST_CASE("records, snapshots and clock") {
    SimConfig c = bump(64, 0.1);
    c.snapshot_times = {0.05, 0.1};
    RunResult r = run(c);
    CHECK(r.steps == 100);
    CHECK(r.records.size() == 11);
    CHECK(r.records.back().t == doctest::Approx(0.1));
    REQUIRE(r.snapshots.size() == 2);
    CHECK(r.snapshots[0].t == doctest::Approx(0.05));
    for (const auto& rec : r.records) CHECK(rec.min_u >= -1e-9 * rec.max_u);
}

TEST_CASE("stability dt") {
    SimConfig c = constant(0.0);
    SimState s = init_state(c);
    CHECK(stability_dt(c, s) == c.t_end);

    SimConfig c2 = constant(0.0);
    c2.cells = {4};
    SimState s2 = init_state(c2);
    for (int i = 0; i < 4; ++i) s2.v[i] = 1.0 + 0.5 * i;  // slope 0.5 per cell, h = 0.25
    double best = c2.t_end;
    for (int i = 0; i < 3; ++i) {
        double chi_face = 0.5 * (1.5 / std::pow(2.0 + 0.5 * i, 2) + 1.5 / std::pow(2.5 + 0.5 * i, 2));
        best = std::min(best, 0.25 / (2.0 * chi_face * 0.5 / 0.25));
    }
    CHECK(stability_dt(c2, s2) == doctest::Approx(best).epsilon(1e-14));

    SimConfig c3 = c2;
    c3.t_end = 10.0;
    c3.cells = {8};
    SimState s3 = init_state(c3);
    for (int i = 0; i < 8; ++i) s3.v[i] = 1.0 + 0.2 * i * 0.125;
    SimConfig c4 = c3;
    c4.cells = {16};
    SimState s4 = init_state(c4);
    for (int i = 0; i < 16; ++i) s4.v[i] = 1.0 + 0.2 * i * 0.0625;
    // same gradient near v = 1, half the spacing
    CHECK(stability_dt(c4, s4) == doctest::Approx(0.5 * stability_dt(c3, s3)).epsilon(0.05));
}

TEST_CASE("blow-up ceiling halts the run") {
    SimConfig c = bump(128, 1.0);
    c.chi.chi0 = 100.0;
    c.blowup_factor = 1.1;
    RunResult r = run(c);
    CHECK(r.blew_up);
    CHECK(r.blowup_time > 0.0);
    CHECK(r.blowup_time < 1.0);
}
