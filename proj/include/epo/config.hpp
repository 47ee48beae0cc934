#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epo/mc_driver.hpp"

namespace epo {

enum class RunMode { McDirect, McCycles, Pde, All };
const char* mode_name(RunMode m);
// Inverse of mode_name; throws ConfigInvalid on anything else.
RunMode mode_from_name(const std::string& name);

// Sweep configuration. Parameter rows are the cross product
// c0_list x k_list x Y_list in declared order (c0 outer, Y inner); the row
// index feeds the per-trajectory seed derivation, so adding rows at the end
// never shifts earlier rows' randomness.
struct ExperimentConfig {
    std::vector<double> c0_list{1.0};
    std::vector<double> k_list{1.0};
    std::vector<double> Y_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double T = 500.0;
    double dt = 1e-4;
    std::size_t MC = 5000;
    std::uint64_t master_seed = 1;
    RunMode mode = RunMode::All;
    std::string out = "out";
    int threads = 1;
    CycleStart cycle_start = CycleStart::BurnIn;
    bool harvest = false; // take every cycle in [0,T] per seed, not just the first
    int dump_paths = 0;   // dump the first N trajectories per row
    std::vector<double> pde_deltas; // empty: auto refinement Y/5, Y/10, Y/20
    double pde_L = 0.0;             // 0: 6/sqrt(2 c0)
    bool dump_fields = false;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Semantic checks (parameter validity, dt guard, mode-dependent minimums).
// Throws ConfigInvalid / NonPositiveParam / OverdampedParam.
void validate_config(const ExperimentConfig& cfg);

// Canonical resolved-config text; embedded in reports so they are
// self-describing, and reparseable as a config file.
std::string config_echo(const ExperimentConfig& cfg);

} // namespace epo
