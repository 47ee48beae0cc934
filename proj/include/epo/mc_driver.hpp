#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epo/cycles.hpp"
#include "epo/estimators.hpp"
#include "epo/sde.hpp"

namespace epo {

// How a single-cycle run reaches its starting rest state:
//   BurnIn - simulate from (0,0) until the first bound rest, cycle from there
//   Corner - start exactly at (0, side*Y), side a fair coin from the seed
enum class CycleStart { BurnIn, Corner };

struct McPlan {
    OscillatorParams params;
    double T = 0.0; // window length (direct) / search cap (cycles)
    double dt = 0.0;
    std::size_t MC = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t row = 0; // parameter-set index within a sweep
};

// Window integrals int_0^T y dt, one slot per trajectory. The parallel
// version distributes trajectories over OpenMP threads but writes the same
// per-trajectory values into the same slots, so results are byte-identical
// to the serial reference for any thread count.
std::vector<double> direct_windows_serial(const McPlan& plan);
std::vector<double> direct_windows_parallel(const McPlan& plan, int threads);

struct SingleCycleBatch {
    std::vector<CycleRecord> cycles; // completed cycles in slot order
    std::size_t attempted = 0;
    std::size_t incomplete = 0; // trajectories whose cap T hit first
};

// One long cycle per seed.
SingleCycleBatch single_cycles_serial(const McPlan& plan, CycleStart start);
SingleCycleBatch single_cycles_parallel(const McPlan& plan, CycleStart start,
                                        int threads);

// Every complete cycle found in [0, T] per trajectory, concatenated in slot
// order (renewal harvesting; more cycles per unit of simulated time).
std::vector<CycleRecord> harvest_cycles_serial(const McPlan& plan);
std::vector<CycleRecord> harvest_cycles_parallel(const McPlan& plan, int threads);

} // namespace epo
