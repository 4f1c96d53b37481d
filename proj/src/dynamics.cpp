#include "kslimit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kslimit/errors.hpp"
#include "kslimit/theory.hpp"

namespace kslimit {

namespace {

constexpr double kPositivityTolerance = 1e-9;

double lyapunov_r(const SimConfig& cfg) {
    if (cfg.lambda == 0.0) return 0.0;
    return theory::r_value({cfg.lyapunov_p, cfg.lyapunov_eps, cfg.lambda, cfg.dim}, cfg.chi);
}

}  // namespace

Grid SimConfig::grid() const { return build_grid(dim, extents, cells); }

long long SimConfig::step_count() const { return std::llround(t_end / dt); }

void validate(const SimConfig& cfg) {
    (void)cfg.grid();  // throws on a bad grid
    validate(cfg.chi);
    if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
        throw ConfigError(fmt::format("time.lambda must be >= 0 (got {})", cfg.lambda));
    }
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw ConfigError(fmt::format("time.dt must be > 0 (got {})", cfg.dt));
    }
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
        throw ConfigError(fmt::format("time.t_end must be > 0 (got {})", cfg.t_end));
    }
    if (cfg.dt > cfg.t_end) {
        throw ConfigError(fmt::format("time.dt = {} exceeds time.t_end = {}", cfg.dt, cfg.t_end));
    }
    const double steps = cfg.t_end / cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
        throw ConfigError(fmt::format("time.t_end = {} is not a whole number of steps dt = {}",
                                      cfg.t_end, cfg.dt));
    }
    if (!(cfg.solver_tol > 0.0)) {
        throw ConfigError(fmt::format("time.solver_tol must be > 0 (got {})", cfg.solver_tol));
    }
    if (!(cfg.blowup_factor > 1.0)) {
        throw ConfigError(fmt::format("time.blowup_factor must be > 1 (got {})", cfg.blowup_factor));
    }
    if (cfg.cadence < 1) {
        throw ConfigError(fmt::format("output.cadence must be >= 1 (got {})", cfg.cadence));
    }
    for (double ts : cfg.snapshot_times) {
        if (!(ts >= 0.0 && ts <= cfg.t_end * (1.0 + 1e-12))) {
            throw ConfigError(
                fmt::format("output.snapshot_times entry {} lies outside [0, t_end]", ts));
        }
    }
    if (!(cfg.q == 0.0 || cfg.q >= 1.0)) {
        throw ConfigError(fmt::format("output.q must be >= 1 or 0 for dim+1 (got {})", cfg.q));
    }
    if (!(cfg.lyapunov_p > 1.0)) {
        throw ConfigError(fmt::format("output.lyapunov_p must be > 1 (got {})", cfg.lyapunov_p));
    }
    if (!(cfg.lyapunov_eps > 0.0 && cfg.lyapunov_eps < 0.5)) {
        throw ConfigError(
            fmt::format("output.lyapunov_eps must lie in (0, 1/2) (got {})", cfg.lyapunov_eps));
    }
    if (!(cfg.eta >= 0.0) || !(cfg.chi.a + cfg.eta > 0.0)) {
        throw ConfigError(fmt::format(
            "output.eta must be >= 0 with chi.a + eta > 0 (got a = {}, eta = {})", cfg.chi.a, cfg.eta));
    }

    const InitSpec& in = cfg.init;
    if (in.preset == InitPreset::gaussian_bump) {
        if (!(in.sigma > 0.0)) {
            throw ConfigError(fmt::format("init.sigma must be > 0 (got {})", in.sigma));
        }
        if (!in.center.empty() && in.center.size() != static_cast<std::size_t>(cfg.dim)) {
            throw ConfigError(fmt::format("init.center needs {} coordinates", cfg.dim));
        }
    } else if (in.u_amp != 0.0 || in.v_amp != 0.0) {
        throw ConfigError("init.u_amp and init.v_amp must be 0 for the constant preset");
    }
}

SimState init_state(const SimConfig& cfg) {
    validate(cfg);
    const Grid g = cfg.grid();
    const InitSpec& in = cfg.init;
    Field u(g, in.u_base);
    Field v(g, in.v_base);
    if (in.preset == InitPreset::gaussian_bump) {
        const double cx = in.center.empty() ? 0.5 * g.lx() : in.center[0];
        const double cy = in.center.size() > 1 ? in.center[1] : 0.5 * g.ly();
        const double two_s2 = 2.0 * in.sigma * in.sigma;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const double dx = g.x_center(i) - cx;
                const double dy = g.dim() == 2 ? g.y_center(j) - cy : 0.0;
                const double bump = std::exp(-(dx * dx + dy * dy) / two_s2);
                u.at(i, j) = in.u_base + in.u_amp * bump;
                v.at(i, j) = in.v_base + in.v_amp * bump;
            }
        }
    }

    if (!(u.min() >= 0.0) || !(u.max() > 0.0)) {
        throw ConfigError("init: u_init must be nonnegative and not identically zero");
    }
    if (cfg.chi.a == 0.0) {
        if (!(v.min() > 0.0)) {
            throw ConfigError("init: with chi.a = 0 the signal v_init must be strictly positive");
        }
    } else if (!(v.min() >= 0.0) || !(v.max() > 0.0)) {
        throw ConfigError("init: v_init must be nonnegative and not identically zero");
    }
    if (!u.all_finite() || !v.all_finite()) {
        throw ConfigError("init: initial data are not finite");
    }
    return {std::move(u), std::move(v), 0.0};
}

Stepper::Stepper(const SimConfig& cfg)
    : cfg_(cfg),
      grid_(cfg.grid()),
      chi_(cfg.sensitivity()),
      v_op_(grid_, cfg.lambda / cfg.dt + 1.0),
      u_op_(grid_, 1.0 / cfg.dt) {
    validate(cfg_);
}

SimState Stepper::step(const SimState& state) const {
    const double dt = cfg_.dt;
    const double relax = cfg_.lambda / dt;

    Field v_rhs(grid_);
    for (std::size_t c = 0; c < v_rhs.size(); ++c) v_rhs[c] = relax * state.v[c] + state.u[c];
    Field v_new = helmholtz_solve(v_op_, v_rhs, cfg_.solver_tol, nullptr, &state.v);

    const Field div = chemotaxis_divergence(grid_, state.u, v_new, chi_, cfg_.flux);
    Field u_rhs(grid_);
    for (std::size_t c = 0; c < u_rhs.size(); ++c) u_rhs[c] = state.u[c] / dt - div[c];
    Field u_new = helmholtz_solve(u_op_, u_rhs, cfg_.solver_tol, nullptr, &state.u);

    const auto lowest = std::min_element(u_new.values().begin(), u_new.values().end());
    const double floor = -kPositivityTolerance * std::max(u_new.max(), 0.0);
    if (*lowest < floor) {
        const auto cell = static_cast<std::size_t>(lowest - u_new.values().begin());
        throw PositivityError(
            fmt::format("u dropped to {} at cell {} (tolerance {})", *lowest, cell, floor), cell,
            *lowest);
    }
    return {std::move(u_new), std::move(v_new), state.t + dt};
}

SimState step(const SimState& state, const SimConfig& cfg) { return Stepper(cfg).step(state); }

DiagnosticsRecord diagnose(const SimState& state, const SimConfig& cfg) {
    const Grid& g = state.u.grid();
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.mass = state.u.integral();
    rec.min_v = state.v.min();
    rec.max_u = state.u.max();
    rec.min_u = state.u.min();
    rec.linf_u = norm_lp(state.u, kInfinityNorm);
    rec.w1q_v = w1q_norm(g, state.v, cfg.resolved_q());
    rec.negative = static_cast<std::size_t>(
        std::count_if(state.u.values().begin(), state.u.values().end(), [](double x) { return x < 0.0; }));
    const auto lyap = theory::lyapunov_functional(state.u, state.v, cfg.lyapunov_p, lyapunov_r(cfg),
                                                  cfg.chi, cfg.eta);
    rec.lyapunov = lyap.value;
    rec.clamped = lyap.clamped;
    return rec;
}

RunResult run(const SimConfig& cfg) {
    RunResult result{init_state(cfg), {}, {}, false, 0.0, 0};
    const Stepper stepper(cfg);
    const long long steps = cfg.step_count();
    const double ceiling = cfg.blowup_factor * result.final_state.u.max();

    std::vector<long long> snapshot_steps;
    for (double ts : cfg.snapshot_times) snapshot_steps.push_back(std::llround(ts / cfg.dt));

    auto maybe_snapshot = [&](long long k, const SimState& s) {
        if (std::find(snapshot_steps.begin(), snapshot_steps.end(), k) != snapshot_steps.end()) {
            result.snapshots.push_back({s.t, s.u, s.v});
        }
    };

    SimState& state = result.final_state;
    result.records.push_back(diagnose(state, cfg));
    maybe_snapshot(0, state);

    for (long long k = 1; k <= steps; ++k) {
        const double t_prev = state.t;
        try {
            state = stepper.step(state);
        } catch (const SolverDivergence& e) {
            throw RunError(fmt::format("t = {}: {}", t_prev, e.what()), t_prev, RunError::Kind::solver);
        } catch (const PositivityError& e) {
            throw RunError(fmt::format("t = {}: {}", t_prev, e.what()), t_prev,
                           RunError::Kind::positivity);
        } catch (const SingularSensitivity& e) {
            throw RunError(fmt::format("t = {}: {}", t_prev, e.what()), t_prev,
                           RunError::Kind::sensitivity);
        }
        // Accumulating dt drifts; pin the clock to the step index.
        state.t = static_cast<double>(k) * cfg.dt;
        result.steps = k;

        const double umax = state.u.max();
        if (!std::isfinite(umax) || !state.u.all_finite() || umax > ceiling) {
            result.blew_up = true;
            result.blowup_time = state.t;
            return result;
        }
        if (k % cfg.cadence == 0 || k == steps) result.records.push_back(diagnose(state, cfg));
        maybe_snapshot(k, state);
    }
    return result;
}

double stability_dt(const SimConfig& cfg, const SimState& state) {
    const Grid& g = state.u.grid();
    const Sensitivity chi = cfg.sensitivity();
    double best = cfg.t_end;
    auto visit = [&](std::size_t lo, std::size_t hi, double h) {
        const double velocity = 0.5 * (chi(state.v[lo]) + chi(state.v[hi])) *
                                std::abs(state.v[hi] - state.v[lo]) / h;
        if (velocity > 0.0) best = std::min(best, h / (2.0 * velocity));
    };
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i + 1 < g.nx(); ++i) visit(g.index(i, j), g.index(i + 1, j), g.hx());
    }
    if (g.dim() == 2) {
        for (int j = 0; j + 1 < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) visit(g.index(i, j), g.index(i, j + 1), g.hy());
        }
    }
    return best;
}

}  // namespace kslimit
