#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kslimit/dynamics.hpp"
#include "kslimit/mesh.hpp"

namespace kslimit {

struct SweepConfig {
    SimConfig base;                      ///< base.lambda is ignored
    std::vector<double> lambdas;         ///< positive, strictly decreasing
    std::vector<double> comparison_times;
    bool use_linf = true;                ///< E(lambda) measured in L-infinity (else L2)
    bool use_l2 = true;
    bool parallel = true;                ///< run the lambdas concurrently
};

void validate(const SweepConfig& sw);

struct ErrorSample {
    double t = 0.0;
    double err_u_linf = 0.0;
    double err_u_l2 = 0.0;
    double err_v_linf = 0.0;
    double err_v_l2 = 0.0;
};

struct LambdaErrors {
    double lambda = 0.0;
    std::vector<ErrorSample> samples;
    double e_u = 0.0;  ///< max over comparison times, primary norm
    double e_v = 0.0;
    double runtime_seconds = 0.0;
};

enum class Monotonicity { not_applicable, strictly_decreasing, nonincreasing, not_monotone };

const char* to_string(Monotonicity m);

struct SweepResult {
    std::vector<LambdaErrors> per_lambda;  ///< in the order of SweepConfig::lambdas
    std::vector<double> ratio_u;           ///< E_u(lambda_{i+1}) / E_u(lambda_i)
    std::vector<double> ratio_v;
    Monotonicity verdict = Monotonicity::not_applicable;
    double reference_runtime_seconds = 0.0;
};

/// A run inside a sweep or probe failed; lambda = 0 denotes the reference run.
class SweepError : public std::runtime_error {
public:
    SweepError(const std::string& what, double lambda, bool blowup = false)
        : std::runtime_error(what), lambda_(lambda), blowup_(blowup) {}
    double lambda() const noexcept { return lambda_; }
    bool blowup() const noexcept { return blowup_; }

private:
    double lambda_;
    bool blowup_;
};

/// Runs the lambda = 0 reference once and every lambda on the same grid,
/// step and initial data, comparing u and v at the comparison times.
SweepResult lambda_sweep(const SweepConfig& sw);

struct C0Estimate {
    Grid grid;
    double t_star = 1.0;
    std::vector<std::size_t> probes;    ///< source cells
    std::vector<double> probe_minima;   ///< min_x w(x, t_star) per source
    double c0 = 0.0;
};

/// Source cells in probing order: corners, center, edge midpoints, then a
/// low-discrepancy fill. Each list is a prefix of any longer one.
std::vector<std::size_t> c0_probe_cells(const Grid& g, int probes);

/// Lower bound of the Neumann kernel of w_t = Lap w - w at t_star, taken over
/// the probe sources. Each source carries unit mass in one cell.
C0Estimate estimate_c0(const Grid& g, double t_star, int probes, int steps = 200);

struct BoundednessEntry {
    double lambda = 0.0;
    double sup_bound = 0.0;  ///< sup_t ( ||u||_inf + ||v||_{W^{1,q}} )
    bool blew_up = false;
    double blowup_time = 0.0;
};

struct BoundednessReport {
    std::vector<BoundednessEntry> entries;
    bool any_blowup = false;
    double ratio = 0.0;  ///< max / min of sup_bound; 0 when a run blew up
};

BoundednessReport boundedness_probe(const SimConfig& base, const std::vector<double>& lambdas);

struct LyapunovReport {
    double r = 0.0;
    std::vector<double> times;
    std::vector<double> values;
    double sup = 0.0;
    double slope = 0.0;        ///< least-squares slope over the trailing half
    double slope_sigma = 0.0;  ///< standard error of that slope
    bool bounded = false;      ///< sup finite and slope <= 3 sigma
};

/// Tracks the weighted functional along a run of `base`; requires lambda > 0
/// and the condition to hold for (p, eps, lambda, n = dim).
LyapunovReport lyapunov_probe(const SimConfig& base, double p, double eps);

}  // namespace kslimit
