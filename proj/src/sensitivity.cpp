#include "kslimit/sensitivity.hpp"

#include <cmath>

#include <fmt/format.h>

#include "kslimit/errors.hpp"

namespace kslimit {

void validate(const ChiParams& chi) {
    if (!(chi.chi0 > 0.0) || !std::isfinite(chi.chi0)) {
        throw ConfigError(fmt::format("chi.chi0 must be a finite value > 0 (got {})", chi.chi0));
    }
    if (!(chi.a >= 0.0) || !std::isfinite(chi.a)) {
        throw ConfigError(fmt::format("chi.a must be a finite value >= 0 (got {})", chi.a));
    }
    if (!(chi.k > 1.0) || !std::isfinite(chi.k)) {
        throw ConfigError(fmt::format("chi.k must satisfy k > 1 (got {})", chi.k));
    }
}

double chi_eval(const ChiParams& chi, double s) {
    const double base = chi.a + s;
    if (!(base > 0.0)) {
        throw SingularSensitivity(
            fmt::format("chi(s) is singular: a + s = {} + {} <= 0", chi.a, s));
    }
    return chi.chi0 / std::pow(base, chi.k);
}

double Sensitivity::operator()(double s) const {
    if (custom) {
        if (!(envelope.a + s > 0.0)) {
            throw SingularSensitivity(
                fmt::format("chi(s) is singular: a + s = {} + {} <= 0", envelope.a, s));
        }
        return custom(s);
    }
    return chi_eval(envelope, s);
}

}  // namespace kslimit
