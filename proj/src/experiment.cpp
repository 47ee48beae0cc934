#include "epo/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "epo/errors.hpp"
#include "epo/mc_driver.hpp"
#include "epo/rng.hpp"

namespace epo {
namespace {

namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string commented(const std::string& text) {
    std::string out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        out += "# " + text.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
    }
    return out;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) fail(errc::io_error, "cannot write '" + p.string() + "'");
    return f;
}

std::vector<double> auto_deltas(double Y) { return {Y / 5.0, Y / 10.0, Y / 20.0}; }

std::string half_width(const EstimateWithCI& e) {
    return fmt(0.5 * (e.ci_high - e.ci_low));
}

void dump_field(const fs::path& p, const Grid& g, const Eigen::VectorXd& u) {
    auto f = open_out(p);
    f << "y,z,value\n";
    for (int i = 0; i < g.Ny; ++i)
        for (int j = 0; j < g.Nz; ++j)
            f << fmt(g.ys[i]) << ',' << fmt(g.zs[j]) << ',' << fmt(u[g.id(i, j)]) << '\n';
}

void dump_paths_for_row(const ExperimentConfig& cfg, const RowResult& r, const fs::path& dir) {
    const auto p = validate_params(r.c0, r.k, r.Y);
    for (int t = 0; t < cfg.dump_paths; ++t) {
        const auto seed = derive_seed(cfg.master_seed, r.row, (std::uint64_t)t);
        Trajectory tr = simulate_trajectory(p, cfg.T, cfg.dt, seed);
        auto f = open_out(dir / ("path_row" + std::to_string(r.row) + "_traj" +
                                 std::to_string(t) + ".csv"));
        f << "t,y,z,delta,regime\n";
        for (size_t n = 0; n < tr.states.size(); ++n) {
            const auto& s = tr.states[n];
            f << fmt(s.t) << ',' << fmt(s.y) << ',' << fmt(s.z) << ',' << fmt(tr.delta[n])
              << ',' << regime_name(s.regime) << '\n';
        }
    }
}

} // namespace

std::vector<RowResult> run_rows(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const bool want_direct = cfg.mode == RunMode::McDirect || cfg.mode == RunMode::All;
    const bool want_cycles = cfg.mode == RunMode::McCycles || cfg.mode == RunMode::All;
    const bool want_pde = cfg.mode == RunMode::Pde || cfg.mode == RunMode::All;

    std::vector<RowResult> rows;
    const auto t_all = clk::now();
    std::size_t row_idx = 0;
    for (double c0 : cfg.c0_list)
        for (double k : cfg.k_list)
            for (double Y : cfg.Y_list) {
                RowResult r;
                r.row = row_idx;
                r.c0 = c0;
                r.k = k;
                r.Y = Y;
                const auto p = validate_params(c0, k, Y);
                McPlan plan{p, cfg.T, cfg.dt, cfg.MC, cfg.master_seed, row_idx};

                if (want_direct) {
                    const auto t0 = clk::now();
                    auto windows = direct_windows_parallel(plan, cfg.threads);
                    r.lhs = direct_variance_estimator(windows, cfg.T);
                    r.mean_zero = mean_zero_check(windows);
                    r.sec_direct = seconds_since(t0);
                }
                if (want_cycles) {
                    const auto t0 = clk::now();
                    std::vector<CycleRecord> cycles;
                    if (cfg.harvest) {
                        cycles = harvest_cycles_parallel(plan, cfg.threads);
                    } else {
                        auto batch = single_cycles_parallel(plan, cfg.cycle_start, cfg.threads);
                        cycles = std::move(batch.cycles);
                        r.incomplete = batch.incomplete;
                    }
                    r.cyc = cycle_drift_estimator(cycles);
                    r.simplified = half_cycle_estimator(cycles);
                    r.sec_cycles = seconds_since(t0);
                }
                if (want_pde) {
                    const auto t0 = clk::now();
                    const auto deltas =
                        cfg.pde_deltas.empty() ? auto_deltas(Y) : cfg.pde_deltas;
                    r.pde_levels = refinement_study(p, deltas, cfg.pde_L);
                    r.sec_pde = seconds_since(t0);
                }
                std::fprintf(stderr,
                             "[row %zu] c0=%g k=%g Y=%g  direct %.2fs  cycles %.2fs  pde %.2fs\n",
                             row_idx, c0, k, Y, r.sec_direct, r.sec_cycles, r.sec_pde);
                rows.push_back(std::move(r));
                ++row_idx;
            }
    std::fprintf(stderr, "total %.2fs over %zu rows\n", seconds_since(t_all), rows.size());
    return rows;
}

void write_reports(const ExperimentConfig& cfg, const std::vector<RowResult>& rows) {
    fs::create_directories(cfg.out);
    const std::string echo = commented(config_echo(cfg));

    {
        auto f = open_out(fs::path(cfg.out) / "report.csv");
        f << echo;
        f << "Y,c0,k,T,dt,MC,lhs,lhs_ci,rhs,rhs_ci,tau_mean,tau_ci,simplified,rel_err_pct\n";
        for (const auto& r : rows) {
            f << fmt(r.Y) << ',' << fmt(r.c0) << ',' << fmt(r.k) << ',' << fmt(cfg.T) << ','
              << fmt(cfg.dt) << ',' << cfg.MC << ',';
            if (r.lhs)
                f << fmt(r.lhs->value) << ',' << half_width(*r.lhs) << ',';
            else
                f << "nan,nan,";
            if (r.cyc)
                f << fmt(r.cyc->ratio.value) << ',' << half_width(r.cyc->ratio) << ','
                  << fmt(r.cyc->tau.value) << ',' << half_width(r.cyc->tau) << ',';
            else
                f << "nan,nan,nan,nan,";
            f << (r.simplified ? fmt(r.simplified->value) : "nan") << ',';
            if (r.lhs && r.cyc)
                f << fmt(100.0 * std::abs(r.lhs->value - r.cyc->ratio.value) /
                         std::abs(r.cyc->ratio.value));
            else
                f << "nan";
            f << '\n';
        }
    }

    struct PlotSpec {
        const char* file;
        const char* what;
    };
    const PlotSpec specs[3] = {{"plot_lhs.dat", "direct window-variance rate"},
                               {"plot_rhs.dat", "cycle-ratio estimate"},
                               {"plot_tau.dat", "mean cycle duration"}};
    for (int which = 0; which < 3; ++which) {
        auto f = open_out(fs::path(cfg.out) / specs[which].file);
        f << "# Y value ci_low ci_high   (" << specs[which].what << ")\n";
        for (const auto& r : rows) {
            const EstimateWithCI* e = nullptr;
            if (which == 0 && r.lhs) e = &*r.lhs;
            if (which == 1 && r.cyc) e = &r.cyc->ratio;
            if (which == 2 && r.cyc) e = &r.cyc->tau;
            if (!e) continue;
            f << fmt(r.Y) << ' ' << fmt(e->value) << ' ' << fmt(e->ci_low) << ' '
              << fmt(e->ci_high) << '\n';
        }
    }

    for (const auto& r : rows) {
        if (r.pde_levels.empty()) continue;
        auto f = open_out(fs::path(cfg.out) / ("pde_row" + std::to_string(r.row) + ".txt"));
        f << echo;
        f << "c0 = " << fmt(r.c0) << "\nk = " << fmt(r.k) << "\nY = " << fmt(r.Y) << "\n";
        for (size_t l = 0; l < r.pde_levels.size(); ++l) {
            const auto& s = r.pde_levels[l];
            f << "level" << l << " = delta " << fmt(s.delta) << ", ny " << s.ny << ", nz "
              << s.nz << ", E_tau1 " << fmt(s.e_tau1) << ", sigma2 " << fmt(s.sigma2) << "\n";
        }
        const auto& s = r.pde_levels.back();
        f << "delta = " << fmt(s.delta) << "\nL = " << fmt(s.L) << "\nny = " << s.ny
          << "\nnz = " << s.nz << "\nn_unknowns = " << s.n_unknowns << "\n";
        f << "E_tau1 = " << fmt(s.e_tau1) << "\nv_plus_y = " << fmt(s.v_plus_y)
          << "\nm2 = " << fmt(s.m2) << "\nsigma2_pde = " << fmt(s.sigma2) << "\n";
        if (r.cyc) {
            f << "tau_mc = " << fmt(r.cyc->tau.value) << "\ngap_tau_pct = "
              << fmt(100.0 * std::abs(s.e_tau1 - r.cyc->tau.value) / r.cyc->tau.value) << "\n";
            f << "rhs_mc = " << fmt(r.cyc->ratio.value) << "\ngap_sigma2_pct = "
              << fmt(100.0 * std::abs(s.sigma2 - r.cyc->ratio.value) / r.cyc->ratio.value)
              << "\n";
        }
    }

    if (cfg.dump_fields) {
        for (const auto& r : rows) {
            if (r.pde_levels.empty()) continue;
            const auto p = validate_params(r.c0, r.k, r.Y);
            Grid g = make_grid(p, r.pde_levels.back().delta, cfg.pde_L);
            PdeWorkspace w(g);
            auto v1 = assemble_v(w, [](double, double) { return 1.0; });
            auto vy = assemble_v(w, [](double y, double) { return y; });
            auto m2 = solve_second_moment(w, vy, [](double y, double) { return y; });
            const std::string stem = "field_row" + std::to_string(r.row) + "_";
            dump_field(fs::path(cfg.out) / (stem + "pi_plus.csv"), g, w.pi_plus());
            dump_field(fs::path(cfg.out) / (stem + "v1.csv"), g, v1.u);
            dump_field(fs::path(cfg.out) / (stem + "vy.csv"), g, vy.u);
            dump_field(fs::path(cfg.out) / (stem + "m2.csv"), g, m2.u);
        }
    }

    if (cfg.dump_paths > 0 && cfg.mode != RunMode::Pde)
        for (const auto& r : rows) dump_paths_for_row(cfg, r, cfg.out);
}

int run_experiment(const ExperimentConfig& cfg) {
    write_reports(cfg, run_rows(cfg));
    return 0;
}

} // namespace epo
