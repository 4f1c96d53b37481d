#pragma once

// Reference computations for the tests. Each one is written out by hand,
// independent of the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "kslimit/mesh.hpp"

namespace oracle {

// sup over tau > 0 of min{e^{-2 tau} vmin, cm (1 - e^{-tau})} via a dense
// log-spaced scan followed by golden-section refinement.
inline double eta_tau_max(double vmin, double cm) {
    auto f = [&](double tau) {
        return std::min(std::exp(-2.0 * tau) * vmin, cm * (1.0 - std::exp(-tau)));
    };
    double best_tau = 1e-8, best = f(best_tau);
    const int n = 200000;
    for (int i = 0; i <= n; ++i) {
        double tau = std::pow(10.0, -8.0 + 12.0 * i / n);
        if (double val = f(tau); val > best) { best = val; best_tau = tau; }
    }
    double lo = best_tau * 0.999, hi = best_tau * 1.001;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
        if (f(m1) < f(m2)) lo = m1; else hi = m2;
    }
    return std::max(best, f(0.5 * (lo + hi)));
}

// Adaptive Simpson.
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
    double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-13) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson_step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4 * fm + fb), tol, 50);
}

// Integral of exp(-(x-c)^2 / (2 s^2)) over [0, L].
inline double truncated_gaussian(double c, double s, double L) {
    const double k = s * std::sqrt(2.0);
    return s * std::sqrt(std::numbers::pi / 2.0) * (std::erf((L - c) / k) + std::erf(c / k));
}

inline double weighted_sum(const kslimit::Field& f) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i];
    return static_cast<double>(acc) * f.grid().cell_volume();
}

// Neumann Laplacian cell by cell, missing neighbours simply dropped.
inline std::vector<double> laplacian_loop(const kslimit::Field& f) {
    const auto& g = f.grid();
    std::vector<double> out(f.size(), 0.0);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            double c = f.at(i, j), s = 0.0;
            if (i > 0) s += (f.at(i - 1, j) - c) / (g.hx() * g.hx());
            if (i + 1 < g.nx()) s += (f.at(i + 1, j) - c) / (g.hx() * g.hx());
            if (g.dim() == 2) {
                if (j > 0) s += (f.at(i, j - 1) - c) / (g.hy() * g.hy());
                if (j + 1 < g.ny()) s += (f.at(i, j + 1) - c) / (g.hy() * g.hy());
            }
            out[g.index(i, j)] = s;
        }
    return out;
}

// (sum over interior faces of |difference quotient|^q * cell volume)^(1/q)
inline double grad_faces(const kslimit::Field& f, double q) {
    const auto& g = f.grid();
    double acc = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i + 1 < g.nx(); ++i)
            acc += std::pow(std::abs(f.at(i + 1, j) - f.at(i, j)) / g.hx(), q);
    if (g.dim() == 2)
        for (int j = 0; j + 1 < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                acc += std::pow(std::abs(f.at(i, j + 1) - f.at(i, j)) / g.hy(), q);
    return std::pow(acc * g.cell_volume(), 1.0 / q);
}

inline double max_abs_diff(const kslimit::Field& a, const kslimit::Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace oracle
