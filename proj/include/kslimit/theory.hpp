#pragma once

#include <cstddef>

#include "kslimit/mesh.hpp"
#include "kslimit/sensitivity.hpp"

namespace kslimit::theory {

/// Inputs of the uniform lower bound eta for the signal.
struct EtaInputs {
    double c0 = 0.0;    ///< lower bound of the Neumann kernel of w_t = Lap w - w
    double mass = 0.0;  ///< ||u_init||_1
    double vmin = 0.0;  ///< min of v_init
};

void validate(const EtaInputs& in);

/// sup over tau > 0 of min{ e^{-2 tau} vmin, c0 m (1 - e^{-tau}) }.
///
/// The first branch decreases and the second increases in tau, so the sup is
/// attained where they cross: with x = e^{-tau}, vmin x^2 = c0 m (1 - x).
double eta_closed_form(const EtaInputs& in);

struct Threshold {
    double value = 0.0;
    /// a + eta == 0: the bound degenerates to chi0 < 0 and no chi0 qualifies.
    bool vacuous = false;
};

/// Smallness bound on chi0 for the parabolic-parabolic system at a given lambda:
/// 4k(a+eta)^{k-1} / ((1-lambda)_+ n + sqrt(n(n lambda^2 - 2n lambda + n + 8 lambda))).
Threshold threshold_chi0_pp(int n, double lambda, const ChiParams& chi, double eta);

/// Lambda-independent bound 2k(a+eta)^{k-1}/n; equals threshold_chi0_pp at lambda = 0.
Threshold threshold_chi0_pe(int n, const ChiParams& chi, double eta);

struct ConditionParams {
    double p = 2.0;
    double eps = 0.25;
    double lambda = 0.0;
    int n = 2;
};

/// p > 1, 0 < eps < 1/2, lambda >= 0, n >= 1; throws ConfigError otherwise.
void validate(const ConditionParams& cond);

/// p lambda^2 + (-2p + 4 eps p + 4 - 4 eps) lambda + p; positive on the admissible set.
double f_poly(const ConditionParams& cond);

/// Discriminant of f_poly as a quadratic in lambda:
/// 4(-(1-(2eps-1)^2) p^2 - 4(1-eps)(1-2eps) p + 4(1-eps)^2).
double f_discriminant(double p, double eps);

/// Both sides of the lambda-multiplied condition
/// ((1-lambda+2 lambda eps)_+ p + sqrt(p f_poly)) chi0 / (2(1-eps)) <= k (a+eta)^exponent.
struct ConditionTerms {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const noexcept { return lhs <= rhs; }
};

/// The condition with right-hand side k(a+eta)^k, as printed in the source.
ConditionTerms condition_terms(const ConditionParams& cond, const ChiParams& chi, double eta);

/// The same left-hand side against k(a+eta)^{k-1}. This is the form under
/// which h_sign <= 0 follows for r = r_value, and the form that reduces to
/// threshold_chi0_pp at p = n/2, eps = 0.
ConditionTerms condition_terms_sharp(const ConditionParams& cond, const ChiParams& chi, double eta);

/// Accepts the closure eps in [0, 1/2), p >= 1 so the eps = 0, p = n/2
/// reduction can be evaluated. Well defined at lambda = 0.
bool condition_ass_pp(const ConditionParams& cond, const ChiParams& chi, double eta);
bool condition_ass_pp_sharp(const ConditionParams& cond, const ChiParams& chi, double eta);

/// Both forms hold; see condition_terms_sharp for why both are required.
bool admissible(const ConditionParams& cond, const ChiParams& chi, double eta);

/// lambda (p-1) chi0 sqrt(p / f_poly).
double r_value(const ConditionParams& cond, const ChiParams& chi);

/// exp(-r * integral_eta^s (a+sigma)^{-k} d sigma), closed form; s >= eta.
double phi_r(double s, double r, const ChiParams& chi, double eta);

/// Lower end exp(-r / ((k-1)(a+eta)^{k-1})) of the range of phi_r on [eta, inf).
double phi_r_floor(double r, const ChiParams& chi, double eta);

/// Quadratic-in-r coefficient function H_{r,eps}(s); requires lambda > 0.
double h_sign(double s, const ConditionParams& cond, const ChiParams& chi, double eta, double r);

struct LyapunovValue {
    double value = 0.0;
    std::size_t clamped = 0;  ///< cells with v < eta, evaluated at v = eta
};

/// Cell-volume weighted sum of u^p phi_r(v).
LyapunovValue lyapunov_functional(const Field& u, const Field& v, double p, double r,
                                  const ChiParams& chi, double eta);

}  // namespace kslimit::theory
