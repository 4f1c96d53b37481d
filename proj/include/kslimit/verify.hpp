#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kslimit/theory.hpp"

namespace kslimit::verify {

inline constexpr std::uint64_t kDefaultSeed = 20170601;

/// The closed forms under test. Defaults point at the theory module; the
/// suite's own sensitivity is checked by swapping one of them out.
struct Formulas {
    std::function<double(const theory::ConditionParams&)> f_poly = theory::f_poly;
    std::function<double(double, double)> f_discriminant = theory::f_discriminant;
    std::function<double(double, const theory::ConditionParams&, const ChiParams&, double, double)>
        h_sign = theory::h_sign;
    std::function<double(double, double, const ChiParams&, double)> phi_r = theory::phi_r;
    std::function<double(const theory::EtaInputs&)> eta_closed_form = theory::eta_closed_form;
};

struct Sizes {
    int f_poly_draws = 100000;
    int discriminant_draws = 100000;
    int sign_parameter_sets = 200;
    int sign_grid_points = 400;
    int phi_draws = 2000;
    int eta_draws = 2000;
    int threshold_draws = 10000;
    int lyapunov_draws = 200;
};

struct PropertyResult {
    std::string name;
    bool passed = true;
    long long checks = 0;
    std::string detail;  ///< counterexample on failure, summary otherwise
};

struct Report {
    std::uint64_t seed = kDefaultSeed;
    std::vector<PropertyResult> properties;
    /// Informational: sampled sets satisfying the k-exponent condition but
    /// not the (k-1)-exponent one, and how many of them have H > 0 somewhere.
    long long printed_only_sets = 0;
    long long printed_only_positive_h = 0;

    bool all_passed() const;
};

Report run_all(std::uint64_t seed = kDefaultSeed, const Sizes& sizes = {},
               const Formulas& formulas = {});

/// The first `count` (p, eps) pairs drawn for the discriminant suite; lets
/// callers confirm that a seed fixes the sample sequence.
std::vector<std::pair<double, double>> sample_sequence(std::uint64_t seed, int count);

}  // namespace kslimit::verify
