// Command-line front end.
//
//   epo run      --config <file> [--mode m] [--out dir] [--threads N]
//   epo validate --config <file>
//
// Exit codes: 0 success, 1 configuration error (bad flags, unreadable or
// invalid config), 2 runtime failure (solver, quadrature, or I/O during the
// run).

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "epo/config.hpp"
#include "epo/errors.hpp"
#include "epo/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"elasto-plastic oscillator: drift of the variance by Monte Carlo"
                 " cycle statistics and by boundary-value solves"};
    app.require_subcommand(1);

    std::string config_path, mode_str, out_dir;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run the configured sweep and write reports");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--mode", mode_str, "override mode: mc_direct|mc_cycles|pde|all");
    run->add_option("--out", out_dir, "override output directory");
    run->add_option("--threads", threads, "override worker thread count");

    auto* val = app.add_subcommand("validate", "parse and validate a config, run nothing");
    val->add_option("--config", config_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e); // prints help/error text itself
        return r == 0 ? 0 : 1;
    }

    epo::ExperimentConfig cfg;
    try {
        cfg = epo::parse_config(config_path);
        if (!mode_str.empty()) cfg.mode = epo::mode_from_name(mode_str);
        if (!out_dir.empty()) cfg.out = out_dir;
        if (threads > 0) cfg.threads = threads;
        epo::validate_config(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }

    if (val->parsed()) {
        std::fprintf(stderr, "ok: %zu parameter set(s), mode %s\n",
                     cfg.c0_list.size() * cfg.k_list.size() * cfg.Y_list.size(),
                     epo::mode_name(cfg.mode));
        return 0;
    }

    try {
        return epo::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}
