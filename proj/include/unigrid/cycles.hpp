/// @file cycles.hpp
/// @brief Smoothers, the multigrid V-cycle, and the unigrid V(nu,0) cycle.

#pragma once

#include "unigrid/amg.hpp"
#include "unigrid/sparse.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace unigrid {

enum class Smoother { gauss_seidel, weighted_jacobi };

struct SolveOptions {
    Index nu1 = 1;
    Index nu2 = 0;
    /// Unigrid step weight; also the base weight before thresholding.
    double omega = 1.0;
    Smoother smoother = Smoother::gauss_seidel;
    double jacobi_weight = 2.0 / 3.0;
    Index max_iters = 100;
    /// Converged when ||r|| <= rel_tol * ||r_0||.
    double rel_tol = 1e-15;
    /// Also converged when ||r|| <= abs_tol (disabled at 0).
    double abs_tol = 0.0;

    void validate() const {
        if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("SolveOptions: omega must lie in (0, 1]");
        if (!(rel_tol > 0.0)) throw std::invalid_argument("SolveOptions: rel_tol must be positive");
        if (abs_tol < 0.0) throw std::invalid_argument("SolveOptions: abs_tol must be nonnegative");
    }
};

struct ConvergenceRecord {
    /// Entry k is measured after iteration k + 1.
    std::vector<double> rel_residuals;
    std::vector<double> problematic_fractions;
    Index iters = 0;
    bool converged = false;
    double initial_residual = 0.0;

    friend bool operator==(const ConvergenceRecord&, const ConvergenceRecord&) = default;
};

/// One lexicographic Gauss-Seidel sweep; each update zeroes the current
/// residual component.
inline void gauss_seidel_sweep(const SparseMatrix& A, std::span<double> u, std::span<const double> b) {
    if (!A.square() || A.rows() != u.size() || b.size() != u.size()) {
        throw DimensionError("gauss_seidel_sweep: dimension mismatch");
    }
    for (Index i = 0; i < A.rows(); ++i) {
        auto rc = A.row_cols(i);
        auto rv = A.row_values(i);
        double diag = 0.0;
        double s = b[i];
        for (std::size_t k = 0; k < rc.size(); ++k) {
            if (rc[k] == i) diag = rv[k];
            else s -= rv[k] * u[rc[k]];
        }
        if (diag == 0.0) throw std::runtime_error("gauss_seidel_sweep: zero diagonal in row " + std::to_string(i));
        u[i] = s / diag;
    }
}

inline void jacobi_sweep(const SparseMatrix& A, std::span<double> u, std::span<const double> b, double weight) {
    DenseVector r = residual(A, u, b);
    for (Index i = 0; i < A.rows(); ++i) {
        const double d = A.at(i, i);
        if (d == 0.0) throw std::runtime_error("jacobi_sweep: zero diagonal in row " + std::to_string(i));
        u[i] += weight * r[i] / d;
    }
}

inline void relax(const SparseMatrix& A, std::span<double> u, std::span<const double> b, Index sweeps,
                  const SolveOptions& opts) {
    for (Index s = 0; s < sweeps; ++s) {
        if (opts.smoother == Smoother::gauss_seidel) gauss_seidel_sweep(A, u, b);
        else jacobi_sweep(A, u, b, opts.jacobi_weight);
    }
}

/// Multigrid V(nu1, nu2) cycle on a Galerkin hierarchy. The coarsest level is
/// relaxed (nu1 + nu2 sweeps from a zero guess) rather than solved.
inline void vcycle(const Hierarchy& h, std::span<double> u, std::span<const double> b, const SolveOptions& opts) {
    const Index L = h.num_levels();
    if (L == 0 || h.fine().rows() != u.size() || b.size() != u.size()) {
        throw DimensionError("vcycle: dimension mismatch");
    }
    std::vector<DenseVector> us(L);
    std::vector<DenseVector> bs(L);
    for (Index k = 1; k < L; ++k) {
        us[k].assign(h.levels[k].A.rows(), 0.0);
    }
    auto level_u = [&](Index k) -> std::span<double> { return k == 0 ? u : std::span<double>(us[k]); };
    auto level_b = [&](Index k) -> std::span<const double> { return k == 0 ? b : std::span<const double>(bs[k]); };

    for (Index k = 0; k + 1 < L; ++k) {
        relax(h.levels[k].A, level_u(k), level_b(k), opts.nu1, opts);
        const DenseVector r = residual(h.levels[k].A, level_u(k), level_b(k));
        bs[k + 1] = spmv(h.levels[k].R, r);
    }
    relax(h.levels[L - 1].A, level_u(L - 1), level_b(L - 1), opts.nu1 + opts.nu2, opts);
    for (Index k = L - 1; k-- > 0;) {
        const DenseVector corr = spmv(h.levels[k].P, us[k + 1]);
        auto uk = level_u(k);
        for (Index i = 0; i < uk.size(); ++i) uk[i] += corr[i];
        relax(h.levels[k].A, uk, level_b(k), opts.nu2, opts);
    }
}

/// delta = <r, d> / <A d, d> for a sparse direction d.
inline double unigrid_delta(std::span<const double> r, std::span<const Index> d_idx, std::span<const double> d_val,
                            double galerkin_diag_entry) {
    if (!(galerkin_diag_entry > 0.0)) {
        throw std::runtime_error("unigrid_delta: non-positive <A d, d>; operator indefinite or hierarchy broken");
    }
    double s = 0.0;
    for (std::size_t q = 0; q < d_idx.size(); ++q) s += r[d_idx[q]] * d_val[q];
    return s / galerkin_diag_entry;
}

/// Dense-direction form, mostly for tests.
inline double unigrid_delta(std::span<const double> r, std::span<const double> d, double galerkin_diag_entry) {
    if (!(galerkin_diag_entry > 0.0)) {
        throw std::runtime_error("unigrid_delta: non-positive <A d, d>; operator indefinite or hierarchy broken");
    }
    return dot(r, d) / galerkin_diag_entry;
}

/// One unigrid direction as seen by a step policy.
struct Direction {
    Index level;
    Index index;
    std::span<const Index> support;
    std::span<const double> values;
    std::span<const Index> applied_support;
    std::span<const double> applied_values;
};

/// u += c d and r -= c A d.
inline void apply_direction(const Direction& d, double c, std::span<double> u, std::span<double> r) {
    for (std::size_t q = 0; q < d.support.size(); ++q) u[d.support[q]] += c * d.values[q];
    for (std::size_t q = 0; q < d.applied_support.size(); ++q) r[d.applied_support[q]] -= c * d.applied_values[q];
}

/// Runs the unigrid loop (levels fine to coarse, nu sweeps per level, all
/// directions of a level in order) and hands each (direction, delta) to
/// `step`, which is responsible for updating u and the maintained residual r.
template <class StepFn>
void unigrid_sweep(const Hierarchy& h, Index nu, std::span<const double> r, StepFn&& step) {
    for (Index k = 0; k < h.num_levels(); ++k) {
        const SparseMatrix& dirs = h.directions[k];
        const SparseMatrix& applied = h.applied_directions[k];
        const DenseVector& diag = h.galerkin_diagonals[k];
        for (Index sweep = 0; sweep < nu; ++sweep) {
            for (Index j = 0; j < dirs.rows(); ++j) {
                const Direction d{k, j, dirs.row_cols(j), dirs.row_values(j), applied.row_cols(j),
                                  applied.row_values(j)};
                const double delta = unigrid_delta(r, d.support, d.values, diag[j]);
                step(d, delta);
            }
        }
    }
}

/// Plain unigrid analogue of V(nu, 0) with weight omega. The fine residual
/// is recomputed on entry and then maintained incrementally; the maintained
/// residual is returned.
inline DenseVector unigrid_cycle(const SparseMatrix& A, std::span<const double> b, std::span<double> u,
                                 const Hierarchy& h, const SolveOptions& opts) {
    if (A.rows() != u.size() || b.size() != u.size() || h.fine().rows() != u.size()) {
        throw DimensionError("unigrid_cycle: dimension mismatch");
    }
    DenseVector r = residual(A, u, b);
    unigrid_sweep(h, opts.nu1, r, [&](const Direction& d, double delta) {
        apply_direction(d, opts.omega * delta, u, r);
    });
    return r;
}

}  // namespace unigrid
