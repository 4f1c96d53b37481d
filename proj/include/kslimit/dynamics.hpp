#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kslimit/mesh.hpp"
#include "kslimit/sensitivity.hpp"

namespace kslimit {

enum class InitPreset { constant, gaussian_bump };

/// Initial data: u = u_base + u_amp g(x), v = v_base + v_amp g(x), with
/// g(x) = exp(-|x - center|^2 / (2 sigma^2)). The constant preset ignores
/// the bump terms.
struct InitSpec {
    InitPreset preset = InitPreset::constant;
    double u_base = 1.0;
    double u_amp = 0.0;
    double v_base = 1.0;
    double v_amp = 0.0;
    double sigma = 0.05;
    std::vector<double> center;  ///< empty: domain center

    friend bool operator==(const InitSpec&, const InitSpec&) = default;
};

struct SimConfig {
    int dim = 1;
    std::vector<double> extents{1.0};
    std::vector<int> cells{512};

    ChiParams chi{};
    /// Optional pointwise sensitivity below the chi envelope; thresholds only see `chi`.
    std::function<double(double)> custom_chi;

    double lambda = 0.0;
    double dt = 1e-4;
    double t_end = 1.0;
    InitSpec init{};
    double solver_tol = 1e-10;
    FluxMode flux = FluxMode::centered;

    int cadence = 100;  ///< steps between diagnostics records
    std::vector<double> snapshot_times;
    double q = 0.0;  ///< W^{1,q} exponent; 0 selects dim + 1
    double lyapunov_p = 2.0;
    double lyapunov_eps = 0.25;
    double eta = 0.0;  ///< floor of the Lyapunov weight's domain
    double blowup_factor = 1e6;

    Grid grid() const;
    Sensitivity sensitivity() const { return {chi, custom_chi}; }
    double resolved_q() const { return q > 0.0 ? q : dim + 1.0; }
    long long step_count() const;
};

/// Throws ConfigError naming the offending setting.
void validate(const SimConfig& cfg);

struct SimState {
    Field u;
    Field v;
    double t = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double min_v = 0.0;
    double max_u = 0.0;
    double min_u = 0.0;
    double linf_u = 0.0;
    double w1q_v = 0.0;
    double lyapunov = 0.0;
    std::size_t clamped = 0;   ///< cells with v below eta in the Lyapunov weight
    std::size_t negative = 0;  ///< cells with u < 0
};

struct Snapshot {
    double t = 0.0;
    Field u;
    Field v;
};

struct RunResult {
    SimState final_state;
    std::vector<DiagnosticsRecord> records;
    std::vector<Snapshot> snapshots;
    bool blew_up = false;
    double blowup_time = 0.0;
    long long steps = 0;
};

/// A step failure during run(), tagged with the simulated time it happened at.
class RunError : public std::runtime_error {
public:
    enum class Kind { solver, positivity, sensitivity, other };
    RunError(const std::string& what, double time, Kind kind)
        : std::runtime_error(what), time_(time), kind_(kind) {}
    double time() const noexcept { return time_; }
    Kind kind() const noexcept { return kind_; }

private:
    double time_;
    Kind kind_;
};

SimState init_state(const SimConfig& cfg);

/// Reusable IMEX stepper: operators are built once per configuration.
///
/// One step solves ((lambda/dt + 1) I - Lap) v_new = (lambda/dt) v + u and
/// then ((1/dt) I - Lap) u_new = u/dt - div(u chi(v_new) grad v_new). At
/// lambda = 0 the first solve is the elliptic equation for v.
class Stepper {
public:
    explicit Stepper(const SimConfig& cfg);

    SimState step(const SimState& state) const;
    const SimConfig& config() const noexcept { return cfg_; }

private:
    SimConfig cfg_;
    Grid grid_;
    Sensitivity chi_;
    HelmholtzOperator v_op_;
    HelmholtzOperator u_op_;
};

SimState step(const SimState& state, const SimConfig& cfg);

DiagnosticsRecord diagnose(const SimState& state, const SimConfig& cfg);

/// Integrates from t = 0 to t_end. Halts early with blew_up set once max u
/// exceeds blowup_factor times its initial maximum (or stops being finite).
RunResult run(const SimConfig& cfg);

/// Largest dt the explicit chemotaxis flux tolerates: min over faces of
/// h / (2 |chi grad v|), capped at t_end.
double stability_dt(const SimConfig& cfg, const SimState& state);

}  // namespace kslimit
