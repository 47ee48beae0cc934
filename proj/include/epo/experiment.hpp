#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epo/config.hpp"
#include "epo/estimators.hpp"
#include "epo/pde.hpp"

namespace epo {

struct RowResult {
    std::size_t row = 0;
    double c0 = 0.0, k = 0.0, Y = 0.0;
    std::optional<EstimateWithCI> lhs;        // direct window-variance rate
    std::optional<EstimateWithCI> mean_zero;  // window means; CI must straddle 0
    std::optional<CycleDriftResult> cyc;      // cycle ratio + tau
    std::optional<EstimateWithCI> simplified; // half-cycle form
    std::size_t incomplete = 0;               // cycle runs that hit the cap T
    std::vector<PdeScalars> pde_levels;       // coarse to fine
    double sec_direct = 0.0, sec_cycles = 0.0, sec_pde = 0.0;
};

// Compute every sweep row per the config mode. Progress and per-row timing
// go to stderr; nothing is written to disk here.
std::vector<RowResult> run_rows(const ExperimentConfig& cfg);

// Emit report.csv, plot files, and per-row solver summaries (plus optional
// field/path dumps) under cfg.out. Every report embeds the resolved config.
void write_reports(const ExperimentConfig& cfg, const std::vector<RowResult>& rows);

// run_rows + write_reports; returns 0 (errors propagate as exceptions).
int run_experiment(const ExperimentConfig& cfg);

} // namespace epo
