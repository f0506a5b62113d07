/// @file solver.hpp
/// @brief Stationary outer iteration driving any of the cycle variants to a
/// residual tolerance while recording convergence and positivity work.

#pragma once

#include "unigrid/amg.hpp"
#include "unigrid/cycles.hpp"
#include "unigrid/discretization.hpp"
#include "unigrid/positivity.hpp"

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace unigrid {

enum class Method { amg, ug_plain, ug_threshold, ug_lininterp, ug_gs };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::amg: return "amg";
        case Method::ug_plain: return "ug-plain";
        case Method::ug_threshold: return "ug-threshold";
        case Method::ug_lininterp: return "ug-lininterp";
        case Method::ug_gs: return "ug-gs";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
    for (Method m : {Method::amg, Method::ug_plain, Method::ug_threshold, Method::ug_lininterp, Method::ug_gs}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

inline bool preserves_positivity(Method m) {
    return m == Method::ug_threshold || m == Method::ug_lininterp || m == Method::ug_gs;
}

inline CorrectionVariant correction_variant(Method m) {
    switch (m) {
        case Method::ug_lininterp: return CorrectionVariant::local_linear_interp;
        case Method::ug_gs: return CorrectionVariant::local_gauss_seidel;
        default: return CorrectionVariant::uniform_threshold;
    }
}

struct LinearSolveReport {
    ConvergenceRecord record;
    PositivityStats stats;
};

/// Fraction of entries that are not strictly positive.
inline double nonpositive_fraction(std::span<const double> u) {
    if (u.empty()) return 0.0;
    const auto bad = std::count_if(u.begin(), u.end(), [](double v) { return !(v > 0.0); });
    return static_cast<double>(bad) / static_cast<double>(u.size());
}

/// Iterates `method` from the initial guess in `u` until the relative (or
/// absolute) residual criterion in `opts` holds or max_iters is reached.
///
/// The per-iteration problematic fraction is the share of non-positive
/// entries for the non-preserving methods, and positivity work divided by
/// the fine-grid size for the preserving ones.
inline LinearSolveReport solve_linear(const LinearProblem& problem, const Hierarchy& h, std::span<double> u,
                                      Method method, const SolveOptions& opts, CorrectionPolicy policy = {},
                                      PositivityMonitor* monitor = nullptr) {
    opts.validate();
    const SparseMatrix& A = problem.A;
    const std::span<const double> b = problem.b;
    if (A.rows() != u.size() || h.fine().rows() != u.size()) throw DimensionError("solve_linear: dimension mismatch");
    policy.variant = correction_variant(method);

    LinearSolveReport rep;
    const double n = static_cast<double>(u.size());
    const double r0 = norm2(residual(A, u, b));
    rep.record.initial_residual = r0;
    auto done = [&](double rn) { return rn <= opts.rel_tol * r0 || rn <= opts.abs_tol; };
    if (r0 == 0.0 || done(r0)) {
        rep.record.converged = true;
        return rep;
    }
    std::vector<Index> all(u.size());
    std::iota(all.begin(), all.end(), Index{0});

    for (Index it = 0; it < opts.max_iters; ++it) {
        PositivityStats cycle;
        switch (method) {
            case Method::amg: vcycle(h, u, b, opts); break;
            case Method::ug_plain: unigrid_cycle(A, b, u, h, opts); break;
            case Method::ug_threshold:
                cycle = unigrid_threshold_cycle(A, b, u, h, opts, policy, monitor).stats;
                break;
            case Method::ug_lininterp:
            case Method::ug_gs:
                cycle = unigrid_local_correction_cycle(problem, u, h, opts, policy, monitor).stats;
                break;
        }
        if (monitor && preserves_positivity(method)) monitor->check(u, all);
        rep.stats += cycle;
        const double rn = norm2(residual(A, u, b));
        rep.record.rel_residuals.push_back(rn / r0);
        rep.record.problematic_fractions.push_back(preserves_positivity(method)
                                                       ? static_cast<double>(cycle.work()) / n
                                                       : nonpositive_fraction(u));
        rep.record.iters = it + 1;
        if (done(rn)) {
            rep.record.converged = true;
            break;
        }
    }
    return rep;
}

}  // namespace unigrid
