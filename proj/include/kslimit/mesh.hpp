#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "kslimit/sensitivity.hpp"

namespace kslimit {

/// Uniform box mesh in one or two dimensions with cell-centered unknowns.
///
/// Cells are ordered row-major: index = j * nx + i, with i running along x.
/// In 1D, ny == 1 and the y extent is a unit placeholder that never enters
/// the cell volume.
class Grid {
public:
    static constexpr int kMinCells = 4;

    static Grid line(double length, int nx);
    static Grid box(double lx, double ly, int nx, int ny);

    int dim() const noexcept { return dim_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return dim_ == 2 ? ly_ : 1.0; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    }
    double cell_volume() const noexcept { return dim_ == 2 ? hx_ * hy_ : hx_; }
    /// |Omega| = product of extents.
    double measure() const noexcept { return dim_ == 2 ? lx_ * ly_ : lx_; }

    std::size_t index(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(i);
    }
    double x_center(int i) const noexcept { return (i + 0.5) * hx_; }
    double y_center(int j) const noexcept { return (j + 0.5) * hy_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Grid(int dim, double lx, double ly, int nx, int ny);

    int dim_;
    double lx_, ly_;
    int nx_, ny_;
    double hx_, hy_;
};

/// Grid from per-axis extents and cell counts; sizes of both spans must equal dim.
Grid build_grid(int dim, std::span<const double> extents, std::span<const int> cells);

/// One real value per cell of a grid.
class Field {
public:
    explicit Field(const Grid& grid, double fill = 0.0);
    Field(const Grid& grid, std::vector<double> values);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& at(int i, int j = 0) noexcept { return values_[grid_.index(i, j)]; }
    double at(int i, int j = 0) const noexcept { return values_[grid_.index(i, j)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept;
    double min() const noexcept;
    double max() const noexcept;
    /// Sum of values times cell volume.
    double integral() const noexcept;

private:
    Grid grid_;
    std::vector<double> values_;
};

enum class FluxMode { centered, upwind };

/// Five-point (three-point in 1D) Laplacian with zero-flux mirror ghosts.
Field laplacian_apply(const Grid& g, const Field& f);

/// Divergence of u chi(v) grad v in conservative face-flux form.
///
/// Each interior face carries (face value of u chi(v)) times the difference
/// quotient of v across it; boundary faces carry no flux. The centered mode
/// averages u chi(v) from both sides, the upwind mode takes u from the cell
/// the chemotactic velocity chi grad v points away from.
Field chemotaxis_divergence(const Grid& g, const Field& u, const Field& v,
                            const Sensitivity& chi, FluxMode mode = FluxMode::centered);

/// alpha * I - Laplacian with homogeneous Neumann boundary.
class HelmholtzOperator {
public:
    HelmholtzOperator(const Grid& grid, double alpha);

    const Grid& grid() const noexcept { return grid_; }
    double alpha() const noexcept { return alpha_; }

    Field apply(const Field& w) const;
    Field diagonal() const;

private:
    Grid grid_;
    double alpha_;
};

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves (alpha I - Laplacian) w = rhs to relative residual tol.
///
/// 1D uses tridiagonal elimination followed by residual refinement sweeps;
/// 2D uses Jacobi-preconditioned conjugate gradients capped at 10 * cells
/// iterations. Throws SolverDivergence when the tolerance is not reached.
Field helmholtz_solve(const HelmholtzOperator& op, const Field& rhs, double tol,
                      SolveStats* stats = nullptr, const Field* initial_guess = nullptr);

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// (sum |f|^p * cell volume)^(1/p), or max |f| for p = infinity.
double norm_lp(const Field& f, double p);

/// L^q norm of the face difference quotients; each face carries one cell volume.
double grad_norm_lq(const Grid& g, const Field& f, double q);

/// norm_lp(f, q) + grad_norm_lq(f, q).
double w1q_norm(const Grid& g, const Field& f, double q);

/// Euclidean inner product of cell values (no volume weight).
double dot(const Field& a, const Field& b);

}  // namespace kslimit
