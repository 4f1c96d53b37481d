#include "kslimit/theory.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "kslimit/errors.hpp"

namespace kslimit::theory {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

double condition_lhs(const ConditionParams& cond, const ChiParams& chi) {
    const double p = cond.p;
    const double eps = cond.eps;
    const double lambda = cond.lambda;
    const double f = p * lambda * lambda + p - 2.0 * p * lambda + 4.0 * eps * p * lambda +
                     4.0 * lambda - 4.0 * eps * lambda;
    const double bracket =
        positive_part(1.0 - lambda + 2.0 * lambda * eps) * p + std::sqrt(p * f);
    return bracket * chi.chi0 / (2.0 * (1.0 - eps));
}

void check_condition_closure(const ConditionParams& cond, const ChiParams& chi, double eta) {
    validate(chi);
    if (!(cond.p >= 1.0) || !(cond.eps >= 0.0 && cond.eps < 0.5) || !(cond.lambda >= 0.0) ||
        cond.n < 1) {
        throw ConfigError(fmt::format(
            "condition needs p >= 1, 0 <= eps < 1/2, lambda >= 0, n >= 1 (got p={}, eps={}, "
            "lambda={}, n={})",
            cond.p, cond.eps, cond.lambda, cond.n));
    }
    if (!(eta >= 0.0)) {
        throw ContractViolation(fmt::format("eta must be >= 0 (got {})", eta));
    }
}

}  // namespace

void validate(const EtaInputs& in) {
    if (!(in.c0 > 0.0) || !(in.mass > 0.0) || !(in.vmin >= 0.0) || !std::isfinite(in.c0) ||
        !std::isfinite(in.mass) || !std::isfinite(in.vmin)) {
        throw ConfigError(fmt::format("eta inputs need c0 > 0, mass > 0, vmin >= 0 (got {}, {}, {})",
                                      in.c0, in.mass, in.vmin));
    }
}

double eta_closed_form(const EtaInputs& in) {
    validate(in);
    if (in.vmin == 0.0) return 0.0;
    const double cm = in.c0 * in.mass;
    // Positive root of vmin x^2 + cm x - cm = 0 written without cancellation.
    const double x = 2.0 * cm / (cm + std::sqrt(cm * cm + 4.0 * in.vmin * cm));
    return in.vmin * x * x;
}

Threshold threshold_chi0_pp(int n, double lambda, const ChiParams& chi, double eta) {
    validate(chi);
    if (n < 1 || !(lambda >= 0.0) || !(chi.a + eta >= 0.0)) {
        throw ContractViolation(fmt::format(
            "threshold_chi0_pp needs n >= 1, lambda >= 0, a + eta >= 0 (got n={}, lambda={}, a+eta={})",
            n, lambda, chi.a + eta));
    }
    const double nn = n;
    const double numerator = chi.k * std::pow(chi.a + eta, chi.k - 1.0);
    const double denominator =
        positive_part(1.0 - lambda) * nn +
        std::sqrt(nn * (nn * lambda * lambda - 2.0 * nn * lambda + nn + 8.0 * lambda));
    return {4.0 * numerator / denominator, chi.a + eta == 0.0};
}

Threshold threshold_chi0_pe(int n, const ChiParams& chi, double eta) {
    validate(chi);
    if (n < 1 || !(chi.a + eta >= 0.0)) {
        throw ContractViolation(fmt::format(
            "threshold_chi0_pe needs n >= 1, a + eta >= 0 (got n={}, a+eta={})", n, chi.a + eta));
    }
    const double numerator = chi.k * std::pow(chi.a + eta, chi.k - 1.0);
    return {2.0 * numerator / static_cast<double>(n), chi.a + eta == 0.0};
}

void validate(const ConditionParams& cond) {
    if (!(cond.p > 1.0) || !std::isfinite(cond.p)) {
        throw ConfigError(fmt::format("p must satisfy p > 1 (got {})", cond.p));
    }
    if (!(cond.eps > 0.0 && cond.eps < 0.5)) {
        throw ConfigError(fmt::format("eps must lie in (0, 1/2) (got {})", cond.eps));
    }
    if (!(cond.lambda >= 0.0) || !std::isfinite(cond.lambda)) {
        throw ConfigError(fmt::format("lambda must be >= 0 (got {})", cond.lambda));
    }
    if (cond.n < 1) {
        throw ConfigError(fmt::format("n must be >= 1 (got {})", cond.n));
    }
}

double f_poly(const ConditionParams& cond) {
    validate(cond);
    const double p = cond.p;
    const double eps = cond.eps;
    const double lambda = cond.lambda;
    return p * lambda * lambda + (-2.0 * p + 4.0 * eps * p + 4.0 - 4.0 * eps) * lambda + p;
}

double f_discriminant(double p, double eps) {
    validate(ConditionParams{p, eps, 0.0, 1});
    const double s = 2.0 * eps - 1.0;
    return 4.0 * (-(1.0 - s * s) * p * p - 4.0 * (1.0 - eps) * (1.0 - 2.0 * eps) * p +
                  4.0 * (1.0 - eps) * (1.0 - eps));
}

ConditionTerms condition_terms(const ConditionParams& cond, const ChiParams& chi, double eta) {
    check_condition_closure(cond, chi, eta);
    return {condition_lhs(cond, chi), chi.k * std::pow(chi.a + eta, chi.k)};
}

ConditionTerms condition_terms_sharp(const ConditionParams& cond, const ChiParams& chi,
                                     double eta) {
    check_condition_closure(cond, chi, eta);
    return {condition_lhs(cond, chi), chi.k * std::pow(chi.a + eta, chi.k - 1.0)};
}

bool condition_ass_pp(const ConditionParams& cond, const ChiParams& chi, double eta) {
    return condition_terms(cond, chi, eta).holds();
}

bool condition_ass_pp_sharp(const ConditionParams& cond, const ChiParams& chi, double eta) {
    return condition_terms_sharp(cond, chi, eta).holds();
}

bool admissible(const ConditionParams& cond, const ChiParams& chi, double eta) {
    return condition_ass_pp(cond, chi, eta) && condition_ass_pp_sharp(cond, chi, eta);
}

double r_value(const ConditionParams& cond, const ChiParams& chi) {
    const double f = f_poly(cond);
    validate(chi);
    return cond.lambda * (cond.p - 1.0) * chi.chi0 * std::sqrt(cond.p / f);
}

double phi_r(double s, double r, const ChiParams& chi, double eta) {
    validate(chi);
    if (!(r >= 0.0)) throw ContractViolation(fmt::format("phi_r needs r >= 0 (got {})", r));
    if (!(chi.a + eta > 0.0)) {
        throw DomainError(fmt::format("phi_r needs a + eta > 0 (got {})", chi.a + eta));
    }
    if (!(s >= eta)) {
        throw DomainError(fmt::format("phi_r is defined for s >= eta (s = {}, eta = {})", s, eta));
    }
    const double integral =
        (std::pow(chi.a + eta, 1.0 - chi.k) - std::pow(chi.a + s, 1.0 - chi.k)) / (chi.k - 1.0);
    return std::exp(-r * integral);
}

double phi_r_floor(double r, const ChiParams& chi, double eta) {
    validate(chi);
    if (!(chi.a + eta > 0.0)) {
        throw DomainError(fmt::format("phi_r needs a + eta > 0 (got {})", chi.a + eta));
    }
    return std::exp(-r / ((chi.k - 1.0) * std::pow(chi.a + eta, chi.k - 1.0)));
}

double h_sign(double s, const ConditionParams& cond, const ChiParams& chi, double eta, double r) {
    const double f = f_poly(cond);
    validate(chi);
    if (!(cond.lambda > 0.0)) {
        throw DomainError("h_sign divides by lambda; lambda must be > 0");
    }
    if (!(s >= eta) || !(chi.a + s > 0.0)) {
        throw DomainError(fmt::format("h_sign needs s >= eta and a + s > 0 (s = {}, eta = {})", s, eta));
    }
    const double p = cond.p;
    const double eps = cond.eps;
    const double lambda = cond.lambda;
    const double base = chi.a + s;
    const double pow2k = std::pow(base, 2.0 * chi.k);
    const double quad = f / (4.0 * lambda * lambda * (1.0 - eps) * (p - 1.0) * pow2k);
    const double lin = positive_part(1.0 - lambda + 2.0 * lambda * eps) * p * chi.chi0 /
                           (2.0 * lambda * (1.0 - eps) * pow2k) -
                       chi.k / (lambda * std::pow(base, chi.k + 1.0));
    const double constant = p * (p - 1.0) * chi.chi0 * chi.chi0 / (4.0 * (1.0 - eps) * pow2k);
    return quad * r * r + lin * r + constant;
}

LyapunovValue lyapunov_functional(const Field& u, const Field& v, double p, double r,
                                  const ChiParams& chi, double eta) {
    if (!(u.grid() == v.grid())) {
        throw ContractViolation("lyapunov_functional: u and v live on different grids");
    }
    if (!(p > 1.0)) throw ContractViolation(fmt::format("lyapunov_functional needs p > 1 (got {})", p));
    constexpr double kNegativeTolerance = -1e-12;
    LyapunovValue out;
    double sum = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (u[c] < kNegativeTolerance) {
            throw PositivityError(
                fmt::format("lyapunov_functional: u = {} < 0 at cell {}", u[c], c), c, u[c]);
        }
        double s = v[c];
        if (s < eta) {
            s = eta;
            ++out.clamped;
        }
        sum += std::pow(std::max(u[c], 0.0), p) * phi_r(s, r, chi, eta);
    }
    out.value = sum * u.grid().cell_volume();
    return out;
}

}  // namespace kslimit::theory
