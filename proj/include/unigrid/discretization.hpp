/// @file discretization.hpp
/// @brief Model-problem assembly: 1D centered differences (linear and
/// Picard-frozen) and 2D bilinear finite elements on uniform meshes.
///
/// All assemblers eliminate Dirichlet boundary values into the right-hand
/// side, so the returned operator acts on interior nodes only.

#pragma once

#include "unigrid/sparse.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace unigrid {

/// σ(x) on the unit interval.
using Coefficient1d = std::function<double(double x)>;
/// a(x, u): a coefficient that may depend on the solution value.
using SolutionCoefficient = std::function<double(double x, double u)>;
/// σ(x, y) on the unit square.
using Coefficient2d = std::function<double(double x, double y)>;
using Source1d = std::function<double(double x)>;
using Source2d = std::function<double(double x, double y)>;

struct LinearProblem {
    SparseMatrix A;
    DenseVector b;
    /// Interior node coordinates. `y` is empty for 1D problems; in 2D node
    /// (i, j) sits at index j * (N - 1) + i with x running fastest.
    std::vector<double> x;
    std::vector<double> y;
    Index n_elements = 0;
    int dimension = 1;
    /// Dirichlet data at x = 0 and x = 1 (1D only).
    double left_value = 0.0;
    double right_value = 0.0;

    Index size() const { return b.size(); }
};

namespace coefficients {

/// 1e12 on (0, 0.4), 1 on [0.4, 1).
inline double sigma_1d_jump(double x, double high = 1e12, double jump_at = 0.4) {
    return x < jump_at ? high : 1.0;
}

/// 1e6 on (0, 0.8) x (0, 0.6), 1 elsewhere.
inline double sigma_2d_region(double x, double y, double high = 1e6, double x_extent = 0.8,
                              double y_extent = 0.6) {
    return (x < x_extent && y < y_extent) ? high : 1.0;
}

/// Periodic checkerboard: 1 inside the centered (5/16, 11/16)^2 box of each
/// unit cell of period 1/p, `contrast` outside.
inline double sigma_checkerboard(double x, double y, double p, double contrast = 1000.0) {
    auto frac = [](double v) { return v - std::floor(v); };
    auto inside = [](double f) { return 5.0 / 16.0 < f && f < 11.0 / 16.0; };
    return (inside(frac(p * x)) && inside(frac(p * y))) ? 1.0 : contrast;
}

/// Mesh density for equidistribution: `high` below the switch value, 1 above.
inline double mesh_density_a(double u, double high = 1000.0, double switch_at = 0.5) {
    return u < switch_at ? high : 1.0;
}

}  // namespace coefficients

namespace detail {

inline void require_elements(Index n_elements, const char* who) {
    if (n_elements < 2) {
        throw std::invalid_argument(std::string(who) + ": need at least 2 elements");
    }
}

/// Tridiagonal FD operator from half-cell coefficients sigma_half[j] at
/// x_{j+1/2}, j = 0..N-1.
inline LinearProblem assemble_tridiagonal(std::span<const double> sigma_half, const Coefficient1d& reaction,
                                          const Source1d& source, Index n_elements, double left_bc,
                                          double right_bc) {
    const Index n = n_elements - 1;
    const double inv_h2 = static_cast<double>(n_elements) * static_cast<double>(n_elements);
    const double h = 1.0 / static_cast<double>(n_elements);

    LinearProblem p;
    p.n_elements = n_elements;
    p.dimension = 1;
    p.left_value = left_bc;
    p.right_value = right_bc;
    p.x.resize(n);
    p.b.assign(n, 0.0);

    std::vector<Triplet> entries;
    entries.reserve(3 * n);
    for (Index row = 0; row < n; ++row) {
        const Index j = row + 1;  // global node index
        const double xj = static_cast<double>(j) * h;
        p.x[row] = xj;
        const double west = sigma_half[j - 1];
        const double east = sigma_half[j];
        double diag = inv_h2 * (west + east);
        if (reaction) diag += reaction(xj);
        if (row > 0) entries.push_back({row, row - 1, -inv_h2 * west});
        entries.push_back({row, row, diag});
        if (row + 1 < n) entries.push_back({row, row + 1, -inv_h2 * east});
        p.b[row] = source ? source(xj) : 0.0;
    }
    p.b.front() += inv_h2 * sigma_half[0] * left_bc;
    p.b.back() += inv_h2 * sigma_half[n_elements - 1] * right_bc;
    p.A = SparseMatrix::from_triplets(n, n, std::move(entries));
    return p;
}

}  // namespace detail

/// Centered differences for -(σ u')' + c(x) u = f on a uniform mesh with N
/// elements. σ is sampled at cell midpoints; `reaction` may be empty.
inline LinearProblem assemble_fd_1d(const Coefficient1d& sigma, const Coefficient1d& reaction,
                                    const Source1d& source, Index n_elements, double left_bc,
                                    double right_bc) {
    detail::require_elements(n_elements, "assemble_fd_1d");
    const double h = 1.0 / static_cast<double>(n_elements);
    std::vector<double> sigma_half(n_elements);
    for (Index j = 0; j < n_elements; ++j) {
        const double xm = (static_cast<double>(j) + 0.5) * h;
        sigma_half[j] = sigma(xm);
        if (!(sigma_half[j] > 0.0)) {
            throw std::invalid_argument("assemble_fd_1d: non-positive diffusion coefficient at x = " +
                                        std::to_string(xm));
        }
    }
    return detail::assemble_tridiagonal(sigma_half, reaction, source, n_elements, left_bc, right_bc);
}

/// Picard-frozen operator A(u_prev): σ_{j+1/2} = a(x_{j+1/2}, (u_j + u_{j+1}) / 2)
/// with the boundary values appended to u_prev. The right-hand side carries
/// only the boundary lifts.
inline LinearProblem assemble_picard_1d(const SolutionCoefficient& a, std::span<const double> u_prev,
                                        Index n_elements, double theta0, double theta1) {
    detail::require_elements(n_elements, "assemble_picard_1d");
    if (u_prev.size() != n_elements - 1) {
        throw DimensionError("assemble_picard_1d: u_prev must hold N - 1 interior values");
    }
    const double h = 1.0 / static_cast<double>(n_elements);
    auto value_at = [&](Index j) {
        if (j == 0) return theta0;
        if (j == n_elements) return theta1;
        return u_prev[j - 1];
    };
    std::vector<double> sigma_half(n_elements);
    for (Index j = 0; j < n_elements; ++j) {
        const double xm = (static_cast<double>(j) + 0.5) * h;
        sigma_half[j] = a(xm, 0.5 * (value_at(j) + value_at(j + 1)));
        if (!(sigma_half[j] > 0.0)) {
            throw std::invalid_argument("assemble_picard_1d: non-positive coefficient");
        }
    }
    return detail::assemble_tridiagonal(sigma_half, {}, {}, n_elements, theta0, theta1);
}

using ElementMatrix = std::array<std::array<double, 4>, 4>;

/// Exact stiffness matrix of the bilinear square element for σ = 1, corners
/// ordered SW, SE, NE, NW. Independent of the element size in 2D.
inline ElementMatrix bilinear_element_stiffness() {
    constexpr double s = 1.0 / 6.0;
    return {{{4 * s, -1 * s, -2 * s, -1 * s},
             {-1 * s, 4 * s, -1 * s, -2 * s},
             {-2 * s, -1 * s, 4 * s, -1 * s},
             {-1 * s, -2 * s, -1 * s, 4 * s}}};
}

/// Bilinear FEM for -div(σ grad u) = f on an N x N mesh of the unit square,
/// homogeneous Dirichlet data. σ is taken at element centers; the load uses
/// one-point (midpoint) quadrature per element.
inline LinearProblem assemble_fem_2d(const Coefficient2d& sigma, const Source2d& source, Index n_elements) {
    detail::require_elements(n_elements, "assemble_fem_2d");
    const Index N = n_elements;
    const Index m = N - 1;
    const double h = 1.0 / static_cast<double>(N);
    const ElementMatrix K = bilinear_element_stiffness();

    LinearProblem p;
    p.n_elements = N;
    p.dimension = 2;
    p.b.assign(m * m, 0.0);
    p.x.resize(m * m);
    p.y.resize(m * m);
    for (Index j = 1; j < N; ++j) {
        for (Index i = 1; i < N; ++i) {
            const Index k = (j - 1) * m + (i - 1);
            p.x[k] = static_cast<double>(i) * h;
            p.y[k] = static_cast<double>(j) * h;
        }
    }
    // Global vertex (i, j) -> interior unknown, or npos on the boundary.
    constexpr Index npos = static_cast<Index>(-1);
    auto unknown = [&](Index i, Index j) {
        if (i == 0 || j == 0 || i == N || j == N) return npos;
        return (j - 1) * m + (i - 1);
    };

    std::vector<Triplet> entries;
    entries.reserve(16 * N * N);
    for (Index ey = 0; ey < N; ++ey) {
        for (Index ex = 0; ex < N; ++ex) {
            const double xc = (static_cast<double>(ex) + 0.5) * h;
            const double yc = (static_cast<double>(ey) + 0.5) * h;
            const double s = sigma(xc, yc);
            if (!(s > 0.0)) throw std::invalid_argument("assemble_fem_2d: non-positive coefficient");
            const double load = (source ? source(xc, yc) : 0.0) * h * h / 4.0;
            const std::array<Index, 4> dofs = {unknown(ex, ey), unknown(ex + 1, ey), unknown(ex + 1, ey + 1),
                                               unknown(ex, ey + 1)};
            for (int a = 0; a < 4; ++a) {
                if (dofs[a] == npos) continue;
                p.b[dofs[a]] += load;
                for (int c = 0; c < 4; ++c) {
                    if (dofs[c] == npos) continue;
                    entries.push_back({dofs[a], dofs[c], s * K[a][c]});
                }
            }
        }
    }
    p.A = SparseMatrix::from_triplets(m * m, m * m, std::move(entries));
    return p;
}

}  // namespace unigrid
