// qjump: batch driver for quantum-jump trajectories, ensembles and the
// equivalence checks.
//
//   qjump verify     --config run.ini
//   qjump trajectory --config run.ini --out out/ [--seed N]
//   qjump ensemble   --config run.ini --out out/ [--threads N] [--seed N]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qjump/commands.hpp"
#include "qjump/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic pure-state simulator for Markovian open quantum systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd, bool with_outputs) {
        cmd->add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Override the configured seed");
        if (with_outputs) {
            cmd->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
            cmd->add_option("--threads", threads, "Worker threads, 0 = auto")->envname("QJUMP_THREADS");
        }
    };
    CLI::App* verify = app.add_subcommand("verify", "Run the invariant and equivalence checks");
    CLI::App* trajectory = app.add_subcommand("trajectory", "Write single-trajectory observables and jumps");
    CLI::App* ensemble = app.add_subcommand("ensemble", "Monte Carlo ensemble against the master equation");
    add_common(verify, false);
    add_common(trajectory, true);
    add_common(ensemble, true);

    CLI11_PARSE(app, argc, argv);

    qjump::CommandOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.threads = threads;
    options.seed = seed;

    try {
        if (verify->parsed()) {
            // Keep malformed generators so the check report can name the failure.
            qjump::RunConfig cfg = qjump::load_config(config_path, {.validate_generator = false});
            cfg = qjump::with_overrides(std::move(cfg), options);
            return qjump::cmd_verify(cfg, std::cout);
        }
        const qjump::RunConfig cfg = qjump::load_config(config_path);
        for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
        if (trajectory->parsed()) return qjump::cmd_trajectory(cfg, options, std::cerr);
        return qjump::cmd_ensemble(cfg, options, std::cerr);
    } catch (const qjump::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
