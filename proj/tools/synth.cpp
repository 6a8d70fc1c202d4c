// synth: data-driven strategy synthesis pipeline driver.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "drsyn/error.hpp"
#include "drsyn/parallel.hpp"
#include "drsyn/pipeline.hpp"

namespace {

struct Common {
    std::string config;
    std::string out = "out";
    std::string artifacts;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
};

CLI::App* add_stage(CLI::App& app, const std::string& name, const std::string& help, Common& opts, bool reads_artifacts) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", opts.config, "Pipeline configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out,-o", opts.out, "Output directory")->capture_default_str();
    if (reads_artifacts)
        sub->add_option("--artifacts,-a", opts.artifacts, "Directory holding earlier stage artifacts (default: --out)");
    sub->add_option("--threads,-j", opts.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--seed", opts.seed, "Override every seed in the configuration");
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust strategy synthesis for switched stochastic systems from noise samples"};
    app.require_subcommand(1);
    Common opts;

    auto* radius = add_stage(app, "radius", "Ambiguity set from the noise samples", opts, false);
    auto* abstract = add_stage(app, "abstract", "Robust MDP abstraction over the grid", opts, true);
    auto* dfa = add_stage(app, "dfa", "Compile the LTLf formula to a minimal DFA", opts, false);
    auto* solve = add_stage(app, "solve", "Robust value iteration on the product", opts, true);
    auto* validate = add_stage(app, "validate", "Monte Carlo check of the certified bounds", opts, true);
    auto* plot = add_stage(app, "export-plot-data", "Per-cell CSV for plotting", opts, true);
    auto* run = add_stage(app, "run", "Full pipeline", opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        drsyn::set_num_threads(opts.threads);
        drsyn::PipelineConfig cfg = drsyn::load_config(opts.config);
        if (opts.seed) drsyn::override_seed(cfg, *opts.seed);
        const std::string in = opts.artifacts.empty() ? opts.out : opts.artifacts;

        if (radius->parsed()) drsyn::stage_radius(cfg, opts.out);
        else if (abstract->parsed()) drsyn::stage_abstract(cfg, in, opts.out);
        else if (dfa->parsed()) drsyn::stage_dfa(cfg, opts.out);
        else if (solve->parsed()) drsyn::stage_solve(cfg, in, opts.out);
        else if (validate->parsed()) drsyn::stage_validate(cfg, in, opts.out);
        else if (plot->parsed()) drsyn::stage_export_plot(cfg, in, opts.out);
        else if (run->parsed()) std::cout << drsyn::summary_table(drsyn::run_pipeline(cfg, opts.out));
    } catch (const drsyn::Error& e) {
        std::cerr << "synth: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "synth: internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
