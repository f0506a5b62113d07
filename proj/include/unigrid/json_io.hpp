/// @file json_io.hpp
/// @brief JSON forms of run configurations, hierarchy summaries and run
/// results.

#pragma once

#include "unigrid/experiments.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

namespace unigrid {

using Json = nlohmann::json;

namespace detail {

template <class Enum, class Parse>
Enum enum_from(const Json& j, const char* key, Parse parse) {
    const auto v = parse(j.get<std::string>());
    if (!v) throw ConfigError(std::string("unknown ") + key + " '" + j.get<std::string>() + "'");
    return *v;
}

inline std::string_view to_string(Smoother s) {
    return s == Smoother::gauss_seidel ? "gauss-seidel" : "weighted-jacobi";
}
inline std::optional<Smoother> parse_smoother(std::string_view s) {
    if (s == "gauss-seidel") return Smoother::gauss_seidel;
    if (s == "weighted-jacobi") return Smoother::weighted_jacobi;
    return std::nullopt;
}
inline std::string_view to_string(CoarseningOrder o) {
    return o == CoarseningOrder::lexicographic ? "lexicographic" : "influence";
}
inline std::optional<CoarseningOrder> parse_order(std::string_view s) {
    if (s == "lexicographic") return CoarseningOrder::lexicographic;
    if (s == "influence") return CoarseningOrder::influence;
    return std::nullopt;
}
inline std::string_view to_string(CorrectionVariant v) {
    switch (v) {
        case CorrectionVariant::uniform_threshold: return "uniform-threshold";
        case CorrectionVariant::local_linear_interp: return "local-linear-interp";
        case CorrectionVariant::local_gauss_seidel: return "local-gauss-seidel";
    }
    return "?";
}
inline std::optional<CorrectionVariant> parse_variant(std::string_view s) {
    for (auto v : {CorrectionVariant::uniform_threshold, CorrectionVariant::local_linear_interp,
                   CorrectionVariant::local_gauss_seidel}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

}  // namespace detail

/// Keys accepted in a run configuration file; they mirror the CLI flags.
inline const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys{"experiment", "n",     "method",        "tol",        "nu",
                                            "epsilon",    "max_iters", "theta",     "omega",      "initial_value",
                                            "coarsening", "smoother", "tau_nl",     "max_picard"};
    return keys;
}

/// Overlays the keys present in `cfg` on `spec`. Unknown keys are errors.
inline void apply_config(const Json& cfg, ExperimentSpec& spec) {
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : cfg.items()) {
        if (!config_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    try {
        if (cfg.contains("experiment")) {
            spec.experiment = detail::enum_from<Experiment>(cfg["experiment"], "experiment", parse_experiment);
        }
        if (cfg.contains("n")) spec.n = cfg["n"].get<Index>();
        if (cfg.contains("method")) spec.method = detail::enum_from<Method>(cfg["method"], "method", parse_method);
        if (cfg.contains("tol")) spec.solve.rel_tol = cfg["tol"].get<double>();
        if (cfg.contains("nu")) spec.solve.nu1 = cfg["nu"].get<Index>();
        if (cfg.contains("epsilon")) spec.policy.epsilon = cfg["epsilon"].get<double>();
        if (cfg.contains("max_iters")) spec.solve.max_iters = cfg["max_iters"].get<Index>();
        if (cfg.contains("theta")) spec.amg.theta = cfg["theta"].get<double>();
        if (cfg.contains("omega")) spec.solve.omega = cfg["omega"].get<double>();
        if (cfg.contains("initial_value")) spec.initial_value = cfg["initial_value"].get<double>();
        if (cfg.contains("coarsening")) {
            spec.amg.order = detail::enum_from<CoarseningOrder>(cfg["coarsening"], "coarsening", detail::parse_order);
        }
        if (cfg.contains("smoother")) {
            spec.solve.smoother = detail::enum_from<Smoother>(cfg["smoother"], "smoother", detail::parse_smoother);
        }
        if (cfg.contains("tau_nl")) spec.picard.tau_nl = cfg["tau_nl"].get<double>();
        if (cfg.contains("max_picard")) spec.picard.max_picard = cfg["max_picard"].get<Index>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline Json load_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    try {
        return Json::parse(is);
    } catch (const Json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

inline Json to_json(const HierarchySummary& s) {
    Json levels = Json::array();
    for (const auto& l : s.levels) levels.push_back({{"n", l.n}, {"nnz", l.nnz}});
    return {{"levels", levels}, {"operator_complexity", s.operator_complexity}, {"grid_complexity", s.grid_complexity}};
}

inline HierarchySummary hierarchy_summary_from_json(const Json& j) {
    HierarchySummary s;
    for (const auto& l : j.at("levels")) s.levels.push_back({l.at("n").get<Index>(), l.at("nnz").get<Index>()});
    s.operator_complexity = j.at("operator_complexity").get<double>();
    s.grid_complexity = j.at("grid_complexity").get<double>();
    return s;
}

inline Json to_json(const ExperimentSpec& s) {
    return {
        {"experiment", to_string(s.experiment)},
        {"n", s.n},
        {"method", to_string(s.method)},
        {"initial_value", s.initial_value},
        {"solve",
         {{"nu1", s.solve.nu1},
          {"nu2", s.solve.nu2},
          {"omega", s.solve.omega},
          {"smoother", detail::to_string(s.solve.smoother)},
          {"jacobi_weight", s.solve.jacobi_weight},
          {"max_iters", s.solve.max_iters},
          {"rel_tol", s.solve.rel_tol},
          {"abs_tol", s.solve.abs_tol}}},
        {"policy",
         {{"variant", detail::to_string(s.policy.variant)},
          {"epsilon", s.policy.epsilon},
          {"gs_cap_factor", s.policy.gs_cap_factor}}},
        {"amg",
         {{"theta", s.amg.theta}, {"order", detail::to_string(s.amg.order)}, {"max_levels", s.amg.max_levels}}},
        {"picard",
         {{"tau_nl", s.picard.tau_nl},
          {"inner_rel_tol", s.picard.inner_rel_tol},
          {"inner_abs_factor", s.picard.inner_abs_factor},
          {"max_picard", s.picard.max_picard}}},
    };
}

inline ExperimentSpec spec_from_json(const Json& j) {
    ExperimentSpec s;
    s.experiment = detail::enum_from<Experiment>(j.at("experiment"), "experiment", parse_experiment);
    s.n = j.at("n").get<Index>();
    s.method = detail::enum_from<Method>(j.at("method"), "method", parse_method);
    s.initial_value = j.at("initial_value").get<double>();
    const Json& so = j.at("solve");
    s.solve.nu1 = so.at("nu1").get<Index>();
    s.solve.nu2 = so.at("nu2").get<Index>();
    s.solve.omega = so.at("omega").get<double>();
    s.solve.smoother = detail::enum_from<Smoother>(so.at("smoother"), "smoother", detail::parse_smoother);
    s.solve.jacobi_weight = so.at("jacobi_weight").get<double>();
    s.solve.max_iters = so.at("max_iters").get<Index>();
    s.solve.rel_tol = so.at("rel_tol").get<double>();
    s.solve.abs_tol = so.at("abs_tol").get<double>();
    const Json& po = j.at("policy");
    s.policy.variant = detail::enum_from<CorrectionVariant>(po.at("variant"), "variant", detail::parse_variant);
    s.policy.epsilon = po.at("epsilon").get<double>();
    s.policy.gs_cap_factor = po.at("gs_cap_factor").get<Index>();
    const Json& ao = j.at("amg");
    s.amg.theta = ao.at("theta").get<double>();
    s.amg.order = detail::enum_from<CoarseningOrder>(ao.at("order"), "order", detail::parse_order);
    s.amg.max_levels = ao.at("max_levels").get<Index>();
    const Json& pi = j.at("picard");
    s.picard.tau_nl = pi.at("tau_nl").get<double>();
    s.picard.inner_rel_tol = pi.at("inner_rel_tol").get<double>();
    s.picard.inner_abs_factor = pi.at("inner_abs_factor").get<double>();
    s.picard.max_picard = pi.at("max_picard").get<Index>();
    return s;
}

inline Json to_json(const PositivityStats& s) {
    return {{"points_recovered", s.points_recovered},
            {"gs_point_updates", s.gs_point_updates},
            {"corrected_steps", s.corrected_steps}};
}

inline PositivityStats stats_from_json(const Json& j) {
    PositivityStats s;
    s.points_recovered = j.at("points_recovered").get<Index>();
    s.gs_point_updates = j.at("gs_point_updates").get<Index>();
    s.corrected_steps = j.at("corrected_steps").get<Index>();
    return s;
}

inline Json to_json(const RunResult& r) {
    Json j{{"spec", to_json(r.spec)},
           {"converged", r.converged},
           {"stats", to_json(r.stats)},
           {"hierarchy", to_json(r.hierarchy)},
           {"wall_seconds", r.wall_seconds},
           {"solution", r.solution}};
    j["linear"] = {{"rel_residuals", r.linear.rel_residuals},
                   {"problematic_fractions", r.linear.problematic_fractions},
                   {"iters", r.linear.iters},
                   {"converged", r.linear.converged},
                   {"initial_residual", r.linear.initial_residual}};
    Json stats = Json::array();
    for (const auto& s : r.picard.stats) stats.push_back(to_json(s));
    j["picard"] = {{"nonlinear_residuals", r.picard.nonlinear_residuals},
                   {"linear_iterations", r.picard.linear_iterations},
                   {"problematic_fractions", r.picard.problematic_fractions},
                   {"stats", stats},
                   {"iters", r.picard.iters},
                   {"converged", r.picard.converged},
                   {"initial_residual", r.picard.initial_residual}};
    return j;
}

inline RunResult run_result_from_json(const Json& j) {
    RunResult r;
    r.spec = spec_from_json(j.at("spec"));
    r.converged = j.at("converged").get<bool>();
    r.stats = stats_from_json(j.at("stats"));
    r.hierarchy = hierarchy_summary_from_json(j.at("hierarchy"));
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.solution = j.at("solution").get<DenseVector>();
    const Json& l = j.at("linear");
    r.linear.rel_residuals = l.at("rel_residuals").get<std::vector<double>>();
    r.linear.problematic_fractions = l.at("problematic_fractions").get<std::vector<double>>();
    r.linear.iters = l.at("iters").get<Index>();
    r.linear.converged = l.at("converged").get<bool>();
    r.linear.initial_residual = l.at("initial_residual").get<double>();
    const Json& p = j.at("picard");
    r.picard.nonlinear_residuals = p.at("nonlinear_residuals").get<std::vector<double>>();
    r.picard.linear_iterations = p.at("linear_iterations").get<std::vector<Index>>();
    r.picard.problematic_fractions = p.at("problematic_fractions").get<std::vector<double>>();
    for (const auto& s : p.at("stats")) r.picard.stats.push_back(stats_from_json(s));
    r.picard.iters = p.at("iters").get<Index>();
    r.picard.converged = p.at("converged").get<bool>();
    r.picard.initial_residual = p.at("initial_residual").get<double>();
    return r;
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace unigrid
