#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "afslab/experiment.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

int run_command(const std::string& name, const std::string& config_path,
                const afslab::CliOverrides& overrides) {
    try {
        const afslab::ExperimentConfig config = afslab::load_config(config_path, overrides);
        if (name == "simulate") {
            afslab::cmd_simulate(config);
        } else if (name == "afs") {
            afslab::cmd_afs(config);
        } else if (name == "norms") {
            afslab::cmd_norms(config);
        } else if (name == "mcr") {
            afslab::cmd_mcr(config);
        } else {
            afslab::cmd_all(config);
        }
        return 0;
    } catch (const afslab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const afslab::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumericError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumericError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "afs-lab: simulate LC/GC-MS-like data, map areas of feasible solutions, "
        "compute L_x-norm surfaces and run penalized MCR-ALS"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    bool out_set = false, threads_set = false, seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides config)")
            ->each([&](const std::string&) { out_set = true; });
        sub->add_option("--threads", threads,
                        "worker threads for grid evaluation (env AFS_LAB_THREADS as fallback)")
            ->each([&](const std::string&) { threads_set = true; });
        sub->add_option("--seed", seed, "override the scenario seed")
            ->each([&](const std::string&) { seed_set = true; });
    };

    for (const char* name : {"simulate", "afs", "norms", "mcr", "all"}) {
        add_common(app.add_subcommand(name));
    }
    app.get_subcommand("simulate")->description("write D/C_true/S_true CSVs and metadata");
    app.get_subcommand("afs")->description("map the area of feasible solutions grid");
    app.get_subcommand("norms")->description("norm surfaces, x-sweep frames and summary");
    app.get_subcommand("mcr")->description("MCR-ALS over the penalty ladder");
    app.get_subcommand("all")->description("simulate + afs + norms + mcr into one directory");

    CLI11_PARSE(app, argc, argv);

    afslab::CliOverrides overrides;
    if (out_set) overrides.out_dir = out_dir;
    if (threads_set) {
        overrides.threads = threads;
    } else if (const char* env = std::getenv("AFS_LAB_THREADS")) {
        try {
            overrides.threads = std::stoi(env);
        } catch (...) {
            std::fprintf(stderr, "config error: AFS_LAB_THREADS is not an integer\n");
            return kExitConfigError;
        }
    }
    if (seed_set) overrides.seed = seed;

    return run_command(app.get_subcommands().front()->get_name(), config_path, overrides);
}
