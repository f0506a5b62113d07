/// @file picard.hpp
/// @brief Picard (frozen-coefficient) iteration for the 1D nonlinear
/// diffusion / mesh-equidistribution problem with a pluggable inner solver.

#pragma once

#include "unigrid/discretization.hpp"
#include "unigrid/solver.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace unigrid {

struct PicardOptions {
    /// Stop when ||b(u) - A(u) u|| <= tau_nl * (same at the initial guess).
    double tau_nl = 1e-10;
    /// Inner solves stop at this relative reduction ...
    double inner_rel_tol = 1e-8;
    /// ... or once below inner_abs_factor * tau_nl * ||r_nl(u0)||.
    double inner_abs_factor = 0.1;
    Index max_picard = 50;

    void validate() const {
        if (!(tau_nl > 0.0 && inner_rel_tol > 0.0 && inner_abs_factor > 0.0)) {
            throw std::invalid_argument("PicardOptions: tolerances must be positive");
        }
    }
};

struct PicardRecord {
    /// Nonlinear residual after Picard step k + 1, relative to the initial one.
    std::vector<double> nonlinear_residuals;
    std::vector<Index> linear_iterations;
    /// Sum of the per-linear-iteration problematic fractions within each step.
    std::vector<double> problematic_fractions;
    std::vector<PositivityStats> stats;
    Index iters = 0;
    bool converged = false;
    double initial_residual = 0.0;

    friend bool operator==(const PicardRecord&, const PicardRecord&) = default;
};

/// Signals that an iteration ran out of budget. Carries what was recorded.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, PicardRecord record)
        : std::runtime_error(what), record_(std::move(record)) {}
    const PicardRecord& record() const { return record_; }

private:
    PicardRecord record_;
};

/// Solves the frozen linear system in place; `opts` carries the inner tolerances.
using InnerSolver = std::function<LinearSolveReport(const LinearProblem&, std::span<double>, const SolveOptions&)>;

/// Inner solver that builds a fresh AMG hierarchy for every Picard matrix.
inline InnerSolver make_inner_solver(Method method, CorrectionPolicy policy = {}, AmgOptions amg = {},
                                     PositivityMonitor* monitor = nullptr) {
    return [=](const LinearProblem& p, std::span<double> u, const SolveOptions& opts) {
        const Hierarchy h = build_hierarchy(p.A, amg);
        return solve_linear(p, h, u, method, opts, policy, monitor);
    };
}

struct PicardProblem {
    SolutionCoefficient a;
    Index n_elements = 0;
    double theta0 = 0.0;
    double theta1 = 1.0;
};

struct PicardResult {
    DenseVector u;
    PicardRecord record;
};

/// Frozen-coefficient iteration A(u_{k-1}) u_k = b(u_{k-1}), warm-starting
/// each inner solve from the previous iterate.
inline PicardResult picard_solve(const PicardProblem& prob, DenseVector u0, const InnerSolver& inner,
                                 SolveOptions inner_opts, const PicardOptions& opts = {}) {
    opts.validate();
    PicardResult out;
    out.u = std::move(u0);
    auto assemble = [&](std::span<const double> u) {
        return assemble_picard_1d(prob.a, u, prob.n_elements, prob.theta0, prob.theta1);
    };
    auto nonlinear_residual = [](const LinearProblem& p, std::span<const double> u) {
        return norm2(residual(p.A, u, p.b));
    };

    LinearProblem frozen = assemble(out.u);
    const double r0 = nonlinear_residual(frozen, out.u);
    out.record.initial_residual = r0;
    const double target = opts.tau_nl * r0;
    if (r0 == 0.0) {
        out.record.converged = true;
        return out;
    }
    inner_opts.rel_tol = opts.inner_rel_tol;
    inner_opts.abs_tol = opts.inner_abs_factor * target;

    for (Index k = 0; k < opts.max_picard; ++k) {
        const LinearSolveReport rep = inner(frozen, out.u, inner_opts);
        frozen = assemble(out.u);
        const double rk = nonlinear_residual(frozen, out.u);

        double fraction_sum = 0.0;
        for (double f : rep.record.problematic_fractions) fraction_sum += f;
        out.record.nonlinear_residuals.push_back(rk / r0);
        out.record.linear_iterations.push_back(rep.record.iters);
        out.record.problematic_fractions.push_back(fraction_sum);
        out.record.stats.push_back(rep.stats);
        out.record.iters = k + 1;
        if (rk <= target) {
            out.record.converged = true;
            return out;
        }
    }
    throw ConvergenceError("picard_solve: no convergence within " + std::to_string(opts.max_picard) + " iterations",
                           out.record);
}

/// u_i = x_i: the uniform-mesh starting guess.
inline DenseVector uniform_grid_guess(Index n_elements) {
    DenseVector u(n_elements - 1);
    for (Index i = 0; i < u.size(); ++i) u[i] = static_cast<double>(i + 1) / static_cast<double>(n_elements);
    return u;
}

}  // namespace unigrid
