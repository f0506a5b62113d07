/// @file experiments.hpp
/// @brief The four model experiments, a runner that records convergence and
/// positivity work, and the CSV form of the records.

#pragma once

#include "unigrid/amg.hpp"
#include "unigrid/discretization.hpp"
#include "unigrid/picard.hpp"
#include "unigrid/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace unigrid {

enum class Experiment { linear_1d, meshgen_1d, piecewise_2d, checkerboard_2d };

inline std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::linear_1d: return "1d-linear";
        case Experiment::meshgen_1d: return "1d-meshgen";
        case Experiment::piecewise_2d: return "2d-piecewise";
        case Experiment::checkerboard_2d: return "2d-checkerboard";
    }
    return "?";
}

inline std::optional<Experiment> parse_experiment(std::string_view s) {
    for (Experiment e : {Experiment::linear_1d, Experiment::meshgen_1d, Experiment::piecewise_2d,
                         Experiment::checkerboard_2d}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

inline int dimension(Experiment e) {
    return (e == Experiment::linear_1d || e == Experiment::meshgen_1d) ? 1 : 2;
}

inline std::vector<Index> shipped_sizes(Experiment e) {
    switch (e) {
        case Experiment::linear_1d:
        case Experiment::meshgen_1d: return {256, 1024};
        case Experiment::piecewise_2d: return {32, 64};
        case Experiment::checkerboard_2d: return {128, 256};
    }
    return {};
}

inline constexpr Method all_methods[] = {Method::amg, Method::ug_plain, Method::ug_threshold, Method::ug_lininterp,
                                         Method::ug_gs};

inline bool method_applies(Experiment e, Method m) {
    return m != Method::ug_lininterp || dimension(e) == 1;
}

/// Thrown for experiment/method combinations that cannot run.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentSpec {
    Experiment experiment = Experiment::linear_1d;
    Index n = 256;
    Method method = Method::amg;
    SolveOptions solve;
    CorrectionPolicy policy;
    AmgOptions amg;
    PicardOptions picard;
    /// Constant initial value for the linear experiments; the mesh problem
    /// always starts from the uniform grid.
    double initial_value = 1.0;

    void validate() const {
        if (!method_applies(experiment, method)) {
            throw ConfigError(std::string(to_string(method)) + " does not apply to " +
                              std::string(to_string(experiment)) + " (1D only)");
        }
        if (n < 2) throw ConfigError("n must be at least 2");
        if (experiment == Experiment::checkerboard_2d && n % 16 != 0) {
            throw ConfigError("2d-checkerboard needs n divisible by 16");
        }
        if (!(initial_value > 0.0)) throw ConfigError("initial value must be positive");
        solve.validate();
        policy.validate();
        picard.validate();
    }

    friend bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
        auto so = [](const SolveOptions& s) {
            return std::tuple(s.nu1, s.nu2, s.omega, s.smoother, s.jacobi_weight, s.max_iters, s.rel_tol, s.abs_tol);
        };
        auto po = [](const CorrectionPolicy& p) { return std::tuple(p.variant, p.epsilon, p.gs_cap_factor); };
        auto ao = [](const AmgOptions& o) { return std::tuple(o.theta, o.order, o.max_levels); };
        auto pi = [](const PicardOptions& o) {
            return std::tuple(o.tau_nl, o.inner_rel_tol, o.inner_abs_factor, o.max_picard);
        };
        return a.experiment == b.experiment && a.n == b.n && a.method == b.method && so(a.solve) == so(b.solve) &&
               po(a.policy) == po(b.policy) && ao(a.amg) == ao(b.amg) && pi(a.picard) == pi(b.picard) &&
               a.initial_value == b.initial_value;
    }
};

/// Per-experiment defaults: V(2,0) cycles, 1e-15 relative reduction for the
/// linear problems, and the initial guesses 1.0 (1D), 0.1 (2D piecewise) and
/// 1.0 (checkerboard).
inline ExperimentSpec default_spec(Experiment e, Index n, Method m) {
    ExperimentSpec s;
    s.experiment = e;
    s.n = n;
    s.method = m;
    s.solve.nu1 = 2;
    s.solve.rel_tol = 1e-15;
    s.solve.max_iters = e == Experiment::meshgen_1d ? 200 : 100;
    s.initial_value = e == Experiment::piecewise_2d ? 0.1 : 1.0;
    return s;
}

/// Assembles the linear system of a linear experiment.
inline LinearProblem build_problem(Experiment e, Index n) {
    using std::numbers::pi;
    switch (e) {
        case Experiment::linear_1d:
            return assemble_fd_1d([](double x) { return coefficients::sigma_1d_jump(x); }, {},
                                  [](double x) { return std::sin(pi * x); }, n, 0.0, 0.0);
        case Experiment::piecewise_2d:
            return assemble_fem_2d([](double x, double y) { return coefficients::sigma_2d_region(x, y); },
                                   [](double x, double y) { return std::sin(pi * x * y); }, n);
        case Experiment::checkerboard_2d: {
            const double p = static_cast<double>(n / 16);
            return assemble_fem_2d([p](double x, double y) { return coefficients::sigma_checkerboard(x, y, p); },
                                   [](double x, double y) { return std::sin(pi * x * y); }, n);
        }
        case Experiment::meshgen_1d: break;
    }
    throw ConfigError("build_problem: 1d-meshgen is nonlinear");
}

inline PicardProblem build_meshgen(Index n) {
    return {[](double, double u) { return coefficients::mesh_density_a(u); }, n, 0.0, 1.0};
}

struct RunResult {
    ExperimentSpec spec;
    bool converged = false;
    /// Filled for the linear experiments.
    ConvergenceRecord linear;
    /// Filled for 1d-meshgen.
    PicardRecord picard;
    PositivityStats stats;
    HierarchySummary hierarchy;
    /// The hierarchy a linear run used; null for 1d-meshgen.
    std::shared_ptr<const Hierarchy> hierarchy_used;
    double wall_seconds = 0.0;
    DenseVector solution;

    Index iterations() const { return spec.experiment == Experiment::meshgen_1d ? picard.iters : linear.iters; }

    /// Compares recorded data. Neither the hierarchy pointer nor the wall
    /// time is part of a result's value.
    friend bool operator==(const RunResult& a, const RunResult& b) {
        return a.spec == b.spec && a.converged == b.converged && a.linear == b.linear && a.picard == b.picard &&
               a.stats == b.stats && a.hierarchy == b.hierarchy && a.solution == b.solution;
    }
};

/// Runs one spec. A linear experiment uses `shared` when given (it must have
/// been built from the same problem) and builds its own hierarchy otherwise.
inline RunResult run_experiment(const ExperimentSpec& spec, std::shared_ptr<const Hierarchy> shared = nullptr,
                                PositivityMonitor* monitor = nullptr) {
    spec.validate();
    RunResult out;
    out.spec = spec;
    const auto t0 = std::chrono::steady_clock::now();

    if (spec.experiment == Experiment::meshgen_1d) {
        const PicardProblem prob = build_meshgen(spec.n);
        DenseVector u0 = uniform_grid_guess(spec.n);
        out.hierarchy = build_hierarchy(assemble_picard_1d(prob.a, u0, spec.n, 0.0, 1.0).A, spec.amg).summary();
        const InnerSolver inner = make_inner_solver(spec.method, spec.policy, spec.amg, monitor);
        try {
            PicardResult res = picard_solve(prob, std::move(u0), inner, spec.solve, spec.picard);
            out.picard = std::move(res.record);
            out.solution = std::move(res.u);
            out.converged = out.picard.converged;
        } catch (const ConvergenceError& e) {
            out.picard = e.record();
            out.converged = false;
        }
        for (const PositivityStats& s : out.picard.stats) out.stats += s;
    } else {
        const LinearProblem problem = build_problem(spec.experiment, spec.n);
        if (!shared) shared = std::make_shared<const Hierarchy>(build_hierarchy(problem.A, spec.amg));
        if (shared->fine() != problem.A) throw ConfigError("run_experiment: hierarchy built for a different operator");
        out.hierarchy = shared->summary();
        out.hierarchy_used = shared;
        out.solution.assign(problem.size(), spec.initial_value);
        const LinearSolveReport rep =
            solve_linear(problem, *shared, out.solution, spec.method, spec.solve, spec.policy, monitor);
        out.linear = rep.record;
        out.stats = rep.stats;
        out.converged = rep.record.converged;
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Runs every applicable method on one experiment. Linear experiments share
/// a single hierarchy across all methods.
inline std::vector<RunResult> compare(const ExperimentSpec& base, std::span<const Method> methods = all_methods,
                                      PositivityMonitor* monitor = nullptr) {
    std::shared_ptr<const Hierarchy> shared;
    if (base.experiment != Experiment::meshgen_1d) {
        shared = std::make_shared<const Hierarchy>(build_hierarchy(build_problem(base.experiment, base.n).A, base.amg));
    }
    std::vector<RunResult> out;
    for (Method m : methods) {
        if (!method_applies(base.experiment, m)) continue;
        ExperimentSpec s = base;
        s.method = m;
        out.push_back(run_experiment(s, shared, monitor));
    }
    return out;
}

// CSV -------------------------------------------------------------------

inline constexpr std::string_view linear_csv_header = "iteration,rel_residual,problematic_fraction";
inline constexpr std::string_view picard_csv_header =
    "picard_iter,nonlinear_rel_residual,linear_iters,problematic_fraction";

namespace detail {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const RunResult& r) {
    if (r.spec.experiment == Experiment::meshgen_1d) {
        os << picard_csv_header << '\n';
        const PicardRecord& p = r.picard;
        for (Index k = 0; k < p.iters; ++k) {
            os << k + 1 << ',' << detail::format_g17(p.nonlinear_residuals[k]) << ',' << p.linear_iterations[k] << ','
               << detail::format_g17(p.problematic_fractions[k]) << '\n';
        }
    } else {
        os << linear_csv_header << '\n';
        const ConvergenceRecord& c = r.linear;
        for (Index k = 0; k < c.iters; ++k) {
            os << k + 1 << ',' << detail::format_g17(c.rel_residuals[k]) << ','
               << detail::format_g17(c.problematic_fractions[k]) << '\n';
        }
    }
    if (!os) throw std::runtime_error("write_csv: write failed");
}

inline void write_csv(const std::filesystem::path& path, const RunResult& r) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path.string());
    write_csv(os, r);
}

/// Parsed CSV: the header and the numeric rows.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_csv: missing header");
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) t.columns.push_back(col);
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) throw std::runtime_error("read_csv: bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != t.columns.size()) throw std::runtime_error("read_csv: ragged row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_csv: cannot open " + path.string());
    return read_csv(is);
}

}  // namespace unigrid
