// Benchmark: serial reference kernels vs the OpenMP slot-parallel versions.
// Also cross-checks that both produce byte-identical outputs, which is the
// contract the tests rely on.

#include <chrono>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "epo/estimators.hpp"
#include "epo/mc_driver.hpp"

using clk = std::chrono::steady_clock;

static double secs(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel Monte Carlo kernel benchmark"};
    double Y = 0.5, T = 50.0, dt = 1e-4;
    std::size_t MC = 200;
    std::vector<int> thread_counts{1, 2, 4};
    app.add_option("--Y", Y);
    app.add_option("--T", T);
    app.add_option("--dt", dt);
    app.add_option("--MC", MC);
    app.add_option("--threads", thread_counts, "thread counts to sweep");
    CLI11_PARSE(app, argc, argv);

    const auto p = epo::validate_params(1.0, 1.0, Y);
    const epo::McPlan plan{p, T, dt, MC, 1, 0};
    const double steps = double(MC) * (T / dt);

    auto t0 = clk::now();
    const auto ref = epo::direct_windows_serial(plan);
    const double s_serial = secs(t0);
    std::printf("direct  serial      %7.2fs  %6.1f Msteps/s\n", s_serial,
                steps / s_serial / 1e6);

    for (int nt : thread_counts) {
        t0 = clk::now();
        const auto par = epo::direct_windows_parallel(plan, nt);
        const double s = secs(t0);
        const bool same = par == ref;
        std::printf("direct  %2d thread%s %7.2fs  %6.1f Msteps/s  x%.2f  %s\n", nt,
                    nt == 1 ? " " : "s", s, steps / s / 1e6, s_serial / s,
                    same ? "bit-identical" : "MISMATCH");
        if (!same) return 1;
    }

    t0 = clk::now();
    const auto cref = epo::single_cycles_serial(plan, epo::CycleStart::BurnIn);
    const double c_serial = secs(t0);
    std::printf("cycles  serial      %7.2fs  (%zu cycles)\n", c_serial, cref.cycles.size());
    for (int nt : thread_counts) {
        t0 = clk::now();
        const auto cpar = epo::single_cycles_parallel(plan, epo::CycleStart::BurnIn, nt);
        const double s = secs(t0);
        bool same = cpar.cycles.size() == cref.cycles.size() &&
                    cpar.incomplete == cref.incomplete;
        for (size_t i = 0; same && i < cref.cycles.size(); ++i)
            same = cpar.cycles[i].full_integral == cref.cycles[i].full_integral &&
                   cpar.cycles[i].duration == cref.cycles[i].duration;
        std::printf("cycles  %2d thread%s %7.2fs  x%.2f  %s\n", nt, nt == 1 ? " " : "s", s,
                    c_serial / s, same ? "bit-identical" : "MISMATCH");
        if (!same) return 1;
    }
    return 0;
}
