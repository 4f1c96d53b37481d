#pragma once

#include <stdexcept>
#include <string>

namespace kslimit {

/// Invalid user-facing configuration (bad extent, k <= 1, unknown key, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (mismatched grids, p < 1, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// chi(s) evaluated where a + s <= 0.
class SingularSensitivity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argument outside the domain of a closed-form formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SolverDivergence : public std::runtime_error {
public:
    SolverDivergence(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class PositivityError : public std::runtime_error {
public:
    PositivityError(const std::string& what, std::size_t cell, double value)
        : std::runtime_error(what), cell_(cell), value_(value) {}

    std::size_t cell() const noexcept { return cell_; }
    double value() const noexcept { return value_; }

private:
    std::size_t cell_;
    double value_;
};

}  // namespace kslimit
