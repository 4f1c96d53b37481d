#include "kslimit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "kslimit/errors.hpp"

namespace kslimit {

namespace {

void require_same_grid(const Grid& g, const Field& f, const char* name) {
    if (!(f.grid() == g)) {
        throw ContractViolation(fmt::format("field '{}' does not live on the given grid", name));
    }
}

// Visits every interior face as (lower cell, upper cell, spacing normal to the face).
template <typename Fn>
void for_each_face(const Grid& g, Fn&& fn) {
    const int nx = g.nx();
    const int ny = g.ny();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            fn(g.index(i, j), g.index(i + 1, j), g.hx());
        }
    }
    if (g.dim() == 2) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                fn(g.index(i, j), g.index(i, j + 1), g.hy());
            }
        }
    }
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Thomas elimination for the 1D operator; the matrix is strictly diagonally
// dominant for alpha > 0 so no pivoting is needed.
std::vector<double> tridiagonal_solve(const Grid& g, double alpha, std::span<const double> rhs) {
    const std::size_t n = rhs.size();
    const double off = -1.0 / (g.hx() * g.hx());
    std::vector<double> cprime(n), dprime(n), x(n);
    auto diag = [&](std::size_t i) {
        const int neighbours = (i == 0 || i + 1 == n) ? 1 : 2;
        return alpha - neighbours * off;
    };
    double denom = diag(0);
    cprime[0] = off / denom;
    dprime[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag(i) - off * cprime[i - 1];
        cprime[i] = off / denom;
        dprime[i] = (rhs[i] - off * dprime[i - 1]) / denom;
    }
    x[n - 1] = dprime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = dprime[i] - cprime[i] * x[i + 1];
    }
    return x;
}

}  // namespace

Grid::Grid(int dim, double lx, double ly, int nx, int ny)
    : dim_(dim), lx_(lx), ly_(ly), nx_(nx), ny_(ny), hx_(lx / nx), hy_(ly / ny) {}

Grid Grid::line(double length, int nx) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError(fmt::format("grid extent must be positive (got {})", length));
    }
    if (nx < kMinCells) {
        throw ConfigError(fmt::format("grid needs at least {} cells per axis (got {})", kMinCells, nx));
    }
    return Grid(1, length, 1.0, nx, 1);
}

Grid Grid::box(double lx, double ly, int nx, int ny) {
    for (double l : {lx, ly}) {
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw ConfigError(fmt::format("grid extent must be positive (got {})", l));
        }
    }
    for (int n : {nx, ny}) {
        if (n < kMinCells) {
            throw ConfigError(
                fmt::format("grid needs at least {} cells per axis (got {})", kMinCells, n));
        }
    }
    return Grid(2, lx, ly, nx, ny);
}

Grid build_grid(int dim, std::span<const double> extents, std::span<const int> cells) {
    if (dim != 1 && dim != 2) {
        throw ConfigError(fmt::format("grid dimension must be 1 or 2 (got {})", dim));
    }
    if (extents.size() != static_cast<std::size_t>(dim) ||
        cells.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError(fmt::format("grid of dimension {} needs {} extents and {} cell counts",
                                      dim, dim, dim));
    }
    if (dim == 1) return Grid::line(extents[0], cells[0]);
    return Grid::box(extents[0], extents[1], cells[0], cells[1]);
}

Field::Field(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ContractViolation(fmt::format("field has {} values but grid has {} cells",
                                            values_.size(), grid_.size()));
    }
}

bool Field::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

double Field::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

double Field::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double Field::integral() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0) * grid_.cell_volume();
}

Field laplacian_apply(const Grid& g, const Field& f) {
    require_same_grid(g, f, "f");
    Field out(g, 0.0);
    for_each_face(g, [&](std::size_t lo, std::size_t hi, double h) {
        const double q = (f[hi] - f[lo]) / (h * h);
        out[lo] += q;
        out[hi] -= q;
    });
    return out;
}

Field chemotaxis_divergence(const Grid& g, const Field& u, const Field& v,
                            const Sensitivity& chi, FluxMode mode) {
    require_same_grid(g, u, "u");
    require_same_grid(g, v, "v");
    const double vmin = v.min();
    if (!(chi.envelope.a + vmin > 0.0)) {
        throw SingularSensitivity(fmt::format(
            "chemotaxis flux needs a + min(v) > 0 (a = {}, min v = {})", chi.envelope.a, vmin));
    }
    std::vector<double> chi_v(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) chi_v[c] = chi(v[c]);

    Field out(g, 0.0);
    for_each_face(g, [&](std::size_t lo, std::size_t hi, double h) {
        const double dv = (v[hi] - v[lo]) / h;
        double flux = 0.0;
        if (mode == FluxMode::centered) {
            flux = 0.5 * (u[lo] * chi_v[lo] + u[hi] * chi_v[hi]) * dv;
        } else {
            const double velocity = 0.5 * (chi_v[lo] + chi_v[hi]) * dv;
            flux = velocity * (velocity > 0.0 ? u[lo] : u[hi]);
        }
        out[lo] += flux / h;
        out[hi] -= flux / h;
    });
    return out;
}

HelmholtzOperator::HelmholtzOperator(const Grid& grid, double alpha) : grid_(grid), alpha_(alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ContractViolation(fmt::format("Helmholtz mass coefficient must be >= 0 (got {})", alpha));
    }
}

Field HelmholtzOperator::apply(const Field& w) const {
    Field out = laplacian_apply(grid_, w);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = alpha_ * w[c] - out[c];
    return out;
}

Field HelmholtzOperator::diagonal() const {
    Field d(grid_, alpha_);
    for_each_face(grid_, [&](std::size_t lo, std::size_t hi, double h) {
        d[lo] += 1.0 / (h * h);
        d[hi] += 1.0 / (h * h);
    });
    return d;
}

namespace {

// Solves A x = rhs with residuals measured against scale rather than |rhs|.
Field solve_scaled(const HelmholtzOperator& op, const Field& rhs, double scale, double tol,
                   SolveStats& local, const Field* initial_guess) {
    const Grid& g = op.grid();
    const double rhs_norm = scale;
    auto residual_of = [&](const Field& x) {
        Field r = op.apply(x);
        for (std::size_t c = 0; c < r.size(); ++c) r[c] = rhs[c] - r[c];
        return r;
    };

    if (g.dim() == 1) {
        Field x(g, tridiagonal_solve(g, op.alpha(), rhs.values()));
        Field r = residual_of(x);
        double rel = norm2(r.values()) / rhs_norm;
        local.iterations = 1;
        // A couple of refinement sweeps absorb the cond(A) * eps growth on fine grids.
        constexpr int kMaxRefinements = 3;
        for (int sweep = 0; sweep < kMaxRefinements && rel > tol; ++sweep) {
            const std::vector<double> d = tridiagonal_solve(g, op.alpha(), r.values());
            for (std::size_t c = 0; c < x.size(); ++c) x[c] += d[c];
            r = residual_of(x);
            rel = norm2(r.values()) / rhs_norm;
            ++local.iterations;
        }
        local.relative_residual = rel;
        if (rel > tol) {
            throw SolverDivergence(
                fmt::format("tridiagonal solve residual {} exceeds tolerance {}", rel, tol), rel,
                local.iterations);
        }
        return x;
    }

    // Jacobi-preconditioned conjugate gradients.
    const int max_iterations = static_cast<int>(10 * g.size());
    const Field diag = op.diagonal();
    Field x = initial_guess ? *initial_guess : Field(g, 0.0);
    require_same_grid(g, x, "initial_guess");
    Field r = residual_of(x);
    Field z(g), p(g);
    for (std::size_t c = 0; c < r.size(); ++c) z[c] = r[c] / diag[c];
    p = z;
    double rz = dot(r, z);
    double rel = norm2(r.values()) / rhs_norm;
    int it = 0;
    while (rel > tol && it < max_iterations) {
        const Field q = op.apply(p);
        const double step = rz / dot(p, q);
        for (std::size_t c = 0; c < x.size(); ++c) {
            x[c] += step * p[c];
            r[c] -= step * q[c];
        }
        ++it;
        rel = norm2(r.values()) / rhs_norm;
        if (rel <= tol) break;
        for (std::size_t c = 0; c < r.size(); ++c) z[c] = r[c] / diag[c];
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t c = 0; c < p.size(); ++c) p[c] = z[c] + beta * p[c];
    }

    // Rows of A sum to alpha, so shifting x by mean(r)/alpha removes the
    // constant component of the residual exactly.
    r = residual_of(x);
    const double shift =
        std::accumulate(r.values().begin(), r.values().end(), 0.0) / (op.alpha() * static_cast<double>(r.size()));
    for (std::size_t c = 0; c < x.size(); ++c) x[c] += shift;
    r = residual_of(x);
    rel = norm2(r.values()) / rhs_norm;

    local.iterations = it;
    local.relative_residual = rel;
    if (rel > tol) {
        throw SolverDivergence(
            fmt::format("conjugate gradients stopped after {} iterations with residual {} > {}",
                        it, rel, tol),
            rel, it);
    }
    return x;
}

}  // namespace

Field helmholtz_solve(const HelmholtzOperator& op, const Field& rhs, double tol,
                      SolveStats* stats, const Field* initial_guess) {
    const Grid& g = op.grid();
    require_same_grid(g, rhs, "rhs");
    if (!(op.alpha() > 0.0)) {
        throw ContractViolation("helmholtz_solve requires alpha > 0");
    }
    if (!(tol > 0.0)) {
        throw ContractViolation(fmt::format("solver tolerance must be positive (got {})", tol));
    }
    if (!rhs.all_finite()) {
        throw ContractViolation("helmholtz_solve: right-hand side contains NaN or Inf");
    }

    const double rhs_norm = norm2(rhs.values());
    SolveStats local;
    if (rhs_norm == 0.0) {
        if (stats) *stats = local;
        return Field(g, 0.0);
    }

    // Constants are exact eigenvectors (A c = alpha c), so peel off the
    // median of rhs and solve only for the deviation. Constant data then never
    // pick up elimination round-off, which would otherwise accumulate over many
    // steps; mostly-zero data (a point source) are left as they are.
    std::vector<double> sorted(rhs.values().begin(), rhs.values().end());
    auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    const double level = *mid;
    const double base = level / op.alpha();
    Field dev = rhs;
    for (std::size_t c = 0; c < dev.size(); ++c) dev[c] -= level;
    Field x(g, 0.0);
    if (norm2(dev.values()) > 0.0) {
        Field guess(g, 0.0);
        if (initial_guess) {
            require_same_grid(g, *initial_guess, "initial_guess");
            guess = *initial_guess;
            for (std::size_t c = 0; c < guess.size(); ++c) guess[c] -= base;
        }
        try {
            x = solve_scaled(op, dev, rhs_norm, tol, local, initial_guess ? &guess : nullptr);
        } catch (const SolverDivergence&) {
            if (stats) *stats = local;
            throw;
        }
    }
    for (std::size_t c = 0; c < x.size(); ++c) x[c] += base;
    if (stats) *stats = local;
    return x;
}

double norm_lp(const Field& f, double p) {
    if (!(p >= 1.0)) {
        throw ContractViolation(fmt::format("norm_lp requires p >= 1 (got {})", p));
    }
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f.values()) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (double x : f.values()) s += std::pow(std::abs(x), p);
    return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double grad_norm_lq(const Grid& g, const Field& f, double q) {
    require_same_grid(g, f, "f");
    if (!(q >= 1.0)) {
        throw ContractViolation(fmt::format("grad_norm_lq requires q >= 1 (got {})", q));
    }
    double s = 0.0;
    if (std::isinf(q)) {
        for_each_face(g, [&](std::size_t lo, std::size_t hi, double h) {
            s = std::max(s, std::abs(f[hi] - f[lo]) / h);
        });
        return s;
    }
    for_each_face(g, [&](std::size_t lo, std::size_t hi, double h) {
        s += std::pow(std::abs(f[hi] - f[lo]) / h, q);
    });
    return std::pow(s * g.cell_volume(), 1.0 / q);
}

double w1q_norm(const Grid& g, const Field& f, double q) {
    return norm_lp(f, q) + grad_norm_lq(g, f, q);
}

double dot(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
    return s;
}

}  // namespace kslimit
