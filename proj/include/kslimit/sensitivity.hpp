#pragma once

#include <functional>

namespace kslimit {

/// Envelope chi0 / (a + s)^k of the signal-dependent sensitivity.
struct ChiParams {
    double chi0 = 1.0;
    double a = 1.0;
    double k = 2.0;

    friend bool operator==(const ChiParams&, const ChiParams&) = default;
};

/// Throws ConfigError unless chi0 > 0, a >= 0 and k > 1.
void validate(const ChiParams& chi);

/// chi0 / (a + s)^k. Throws SingularSensitivity when a + s <= 0.
double chi_eval(const ChiParams& chi, double s);

/// A sensitivity function together with the envelope it is declared to satisfy.
///
/// Without a custom function the envelope itself is used. With one, the
/// dynamics evaluate the custom function pointwise while every threshold
/// and condition only sees the envelope.
struct Sensitivity {
    ChiParams envelope;
    std::function<double(double)> custom;

    Sensitivity() = default;
    Sensitivity(const ChiParams& chi) : envelope(chi) {}  // NOLINT(google-explicit-constructor)
    Sensitivity(const ChiParams& chi, std::function<double(double)> fn)
        : envelope(chi), custom(std::move(fn)) {}

    double operator()(double s) const;
};

}  // namespace kslimit
