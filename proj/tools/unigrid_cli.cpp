// Command-line driver for the model experiments.
//
// Exit codes: 0 converged, 2 not converged (or positivity could not be
// restored), 1 usage or configuration error.

#include "unigrid/unigrid.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace unigrid;

constexpr int exit_converged = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_converged = 2;

struct Flags {
    std::optional<std::string> experiment;
    std::optional<Index> n;
    std::optional<std::string> method;
    std::optional<double> tol;
    std::optional<Index> nu;
    std::optional<double> epsilon;
    std::optional<Index> max_iters;
    std::optional<std::string> coarsening;
    std::string config;
};

void add_common(CLI::App* cmd, Flags& f, bool with_method) {
    cmd->add_option("--experiment", f.experiment, "1d-linear | 1d-meshgen | 2d-piecewise | 2d-checkerboard");
    cmd->add_option("--n", f.n, "number of elements per direction");
    if (with_method) cmd->add_option("--method", f.method, "amg | ug-plain | ug-threshold | ug-lininterp | ug-gs");
    cmd->add_option("--tol", f.tol, "relative residual reduction (linear solves)");
    cmd->add_option("--nu", f.nu, "relaxation sweeps per level");
    cmd->add_option("--epsilon", f.epsilon, "thresholding safety margin");
    cmd->add_option("--max-iters", f.max_iters, "iteration budget of each linear solve");
    cmd->add_option("--coarsening", f.coarsening, "lexicographic | influence");
    cmd->add_option("--config", f.config, "JSON file with the same keys as the flags")->check(CLI::ExistingFile);
}

/// Config first, then explicit flags on top of the per-experiment defaults.
ExperimentSpec resolve(const Flags& f) {
    Json cfg = Json::object();
    if (!f.config.empty()) cfg = load_json(f.config);
    if (f.experiment) cfg["experiment"] = *f.experiment;
    if (f.n) cfg["n"] = *f.n;
    if (f.method) cfg["method"] = *f.method;
    if (f.tol) cfg["tol"] = *f.tol;
    if (f.nu) cfg["nu"] = *f.nu;
    if (f.epsilon) cfg["epsilon"] = *f.epsilon;
    if (f.max_iters) cfg["max_iters"] = *f.max_iters;
    if (f.coarsening) cfg["coarsening"] = *f.coarsening;

    if (!cfg.contains("experiment")) throw ConfigError("--experiment is required");
    ExperimentSpec probe;
    apply_config(cfg, probe);  // validates keys and parses the enums
    const Index n = cfg.contains("n") ? probe.n : shipped_sizes(probe.experiment).front();
    ExperimentSpec spec = default_spec(probe.experiment, n, probe.method);
    apply_config(cfg, spec);
    spec.validate();
    return spec;
}

void print_summary(const RunResult& r, const PositivityMonitor& mon) {
    std::printf("%-16s N=%-5zu %-13s %s after %zu iterations", std::string(to_string(r.spec.experiment)).c_str(),
                r.spec.n, std::string(to_string(r.spec.method)).c_str(),
                r.converged ? "converged" : "NOT converged", r.iterations());
    if (r.spec.experiment == Experiment::meshgen_1d) {
        Index lin = 0;
        for (Index l : r.picard.linear_iterations) lin += l;
        std::printf(" (%zu linear)", lin);
    }
    std::printf(", positivity work %.6g", static_cast<double>(r.stats.work()));
    if (preserves_positivity(r.spec.method)) std::printf(", monitor violations %zu", mon.violations);
    std::printf("\n");
}

int cmd_run(const Flags& f, const std::string& out, const std::string& plot, const std::string& dump,
            const std::string& result_json) {
    const ExperimentSpec spec = resolve(f);
    PositivityMonitor mon;
    const RunResult r = run_experiment(spec, nullptr, &mon);
    print_summary(r, mon);
    if (!out.empty()) write_csv(out, r);
    if (!plot.empty()) render_plot(std::span<const RunResult>(&r, 1), plot);
    if (!dump.empty()) write_json(dump, to_json(r.hierarchy));
    if (!result_json.empty()) write_json(result_json, to_json(r));
    return r.converged && mon.violations == 0 ? exit_converged : exit_not_converged;
}

int cmd_compare(const Flags& f, const std::string& out_dir, const std::string& plot) {
    const ExperimentSpec spec = resolve(f);
    PositivityMonitor mon;
    const std::vector<RunResult> results = compare(spec, all_methods, &mon);
    bool ok = mon.violations == 0;
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    for (const RunResult& r : results) {
        print_summary(r, mon);
        ok = ok && r.converged;
        if (!out_dir.empty()) {
            const std::string name = std::string(to_string(spec.experiment)) + "_" + std::to_string(spec.n) + "_" +
                                     std::string(to_string(r.spec.method)) + ".csv";
            write_csv(std::filesystem::path(out_dir) / name, r);
        }
    }
    if (!plot.empty()) render_plot(results, plot);
    return ok ? exit_converged : exit_not_converged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positivity-preserving unigrid and AMG model experiments"};
    app.require_subcommand(1);

    Flags run_flags;
    std::string out, plot, dump, result_json;
    CLI::App* run = app.add_subcommand("run", "run one method on one experiment");
    add_common(run, run_flags, true);
    run->add_option("--out", out, "per-iteration CSV");
    run->add_option("--plot", plot, "SVG convergence plot");
    run->add_option("--dump-hierarchy", dump, "JSON summary of the AMG hierarchy");
    run->add_option("--result-json", result_json, "full run result as JSON");

    Flags cmp_flags;
    std::string out_dir, cmp_plot;
    CLI::App* cmp = app.add_subcommand("compare", "run every applicable method on one experiment");
    add_common(cmp, cmp_flags, false);
    cmp->add_option("--out-dir", out_dir, "directory for one CSV per method");
    cmp->add_option("--plot", cmp_plot, "combined SVG plot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags, out, plot, dump, result_json);
        return cmd_compare(cmp_flags, out_dir, cmp_plot);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << (run->parsed() ? run->help() : cmp->help());
        return exit_usage;
    } catch (const PositivityError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return exit_not_converged;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
}
