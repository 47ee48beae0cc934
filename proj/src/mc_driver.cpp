#include "epo/mc_driver.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace epo {

namespace {

std::size_t steps_for(double T, double dt) {
    return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

// hot loop shared by every kernel: one full trajectory, no allocation
template <class OnStep>
void run_one(const OscillatorParams& p, State s, std::size_t n_steps, double dt,
             NormalStream& g, OnStep&& on_step) {
    const double sq = std::sqrt(dt);
    double y = s.y, z = s.z;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double yn = y - (p.c0 * y + p.k * z) * dt + sq * g.next();
        double zp = z + y * dt;
        if (zp > p.Y) zp = p.Y;
        if (zp < -p.Y) zp = -p.Y;
        if (!on_step(y, yn, zp, n)) return;
        y = yn;
        z = zp;
    }
}

double direct_window_one(const OscillatorParams& p, std::size_t n_steps, double dt,
                         std::uint64_t seed) {
    NormalStream g(seed);
    double acc = 0.0, comp = 0.0; // Kahan on the running integral
    run_one(p, State{}, n_steps, dt, g, [&](double y, double, double, std::size_t) {
        const double x = y * dt;
        const double t = acc + x;
        if (std::abs(acc) >= std::abs(x))
            comp += (acc - t) + x;
        else
            comp += (x - t) + acc;
        acc = t;
        return true;
    });
    return acc + comp;
}

std::optional<CycleRecord> single_cycle_one(const OscillatorParams& p,
                                            std::size_t n_cap, double dt,
                                            std::uint64_t seed, CycleStart start) {
    NormalStream g(seed);
    CycleHarvester h;
    State s0;
    if (start == CycleStart::Corner) {
        const int side = (g.next() < 0.0) ? -1 : +1;
        s0.z = side * p.Y;
        s0.regime = regime_of(s0.z, p.Y);
        h.open_at(side, 0.0);
    }
    h.feed(s0, 0, dt);

    std::optional<CycleRecord> done;
    std::int64_t idx = 1;
    run_one(p, s0, n_cap, dt, g, [&](double, double yn, double zp, std::size_t) {
        State st;
        st.t = static_cast<double>(idx) * dt;
        st.y = yn;
        st.z = zp;
        st.regime = regime_of(zp, p.Y);
        done = h.feed(st, idx++, dt);
        return !done.has_value();
    });
    return done;
}

std::vector<CycleRecord> harvest_one(const OscillatorParams& p, std::size_t n_steps,
                                     double dt, std::uint64_t seed) {
    NormalStream g(seed);
    CycleHarvester h;
    State s0;
    h.feed(s0, 0, dt);
    std::vector<CycleRecord> out;
    std::int64_t idx = 1;
    run_one(p, s0, n_steps, dt, g, [&](double, double yn, double zp, std::size_t) {
        State st;
        st.t = static_cast<double>(idx) * dt;
        st.y = yn;
        st.z = zp;
        st.regime = regime_of(zp, p.Y);
        if (auto c = h.feed(st, idx++, dt)) out.push_back(*c);
        return true;
    });
    return out;
}

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

} // namespace

std::vector<double> direct_windows_serial(const McPlan& plan) {
    check_dt_guard(plan.params, plan.dt);
    const auto n_steps = steps_for(plan.T, plan.dt);
    std::vector<double> out(plan.MC);
    for (std::size_t i = 0; i < plan.MC; ++i)
        out[i] = direct_window_one(plan.params, n_steps, plan.dt,
                                   derive_seed(plan.master_seed, plan.row, i));
    return out;
}

std::vector<double> direct_windows_parallel(const McPlan& plan, int threads) {
    check_dt_guard(plan.params, plan.dt);
    const auto n_steps = steps_for(plan.T, plan.dt);
    std::vector<double> out(plan.MC);
    set_threads(threads);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(plan.MC); ++i)
        out[static_cast<std::size_t>(i)] =
            direct_window_one(plan.params, n_steps, plan.dt,
                              derive_seed(plan.master_seed, plan.row,
                                          static_cast<std::uint64_t>(i)));
    return out;
}

namespace {

SingleCycleBatch collect_single(const McPlan& plan,
                                const std::vector<std::optional<CycleRecord>>& slots) {
    SingleCycleBatch b;
    b.attempted = plan.MC;
    b.cycles.reserve(plan.MC);
    for (const auto& s : slots) {
        if (s)
            b.cycles.push_back(*s);
        else
            ++b.incomplete;
    }
    return b;
}

} // namespace

SingleCycleBatch single_cycles_serial(const McPlan& plan, CycleStart start) {
    check_dt_guard(plan.params, plan.dt);
    const auto n_cap = steps_for(plan.T, plan.dt);
    std::vector<std::optional<CycleRecord>> slots(plan.MC);
    for (std::size_t i = 0; i < plan.MC; ++i)
        slots[i] = single_cycle_one(plan.params, n_cap, plan.dt,
                                    derive_seed(plan.master_seed, plan.row, i), start);
    return collect_single(plan, slots);
}

SingleCycleBatch single_cycles_parallel(const McPlan& plan, CycleStart start,
                                        int threads) {
    check_dt_guard(plan.params, plan.dt);
    const auto n_cap = steps_for(plan.T, plan.dt);
    std::vector<std::optional<CycleRecord>> slots(plan.MC);
    set_threads(threads);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(plan.MC); ++i)
        slots[static_cast<std::size_t>(i)] =
            single_cycle_one(plan.params, n_cap, plan.dt,
                             derive_seed(plan.master_seed, plan.row,
                                         static_cast<std::uint64_t>(i)),
                             start);
    return collect_single(plan, slots);
}

std::vector<CycleRecord> harvest_cycles_serial(const McPlan& plan) {
    check_dt_guard(plan.params, plan.dt);
    const auto n_steps = steps_for(plan.T, plan.dt);
    std::vector<std::vector<CycleRecord>> per(plan.MC);
    for (std::size_t i = 0; i < plan.MC; ++i)
        per[i] = harvest_one(plan.params, n_steps, plan.dt,
                             derive_seed(plan.master_seed, plan.row, i));
    std::vector<CycleRecord> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::vector<CycleRecord> harvest_cycles_parallel(const McPlan& plan, int threads) {
    check_dt_guard(plan.params, plan.dt);
    const auto n_steps = steps_for(plan.T, plan.dt);
    std::vector<std::vector<CycleRecord>> per(plan.MC);
    set_threads(threads);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(plan.MC); ++i)
        per[static_cast<std::size_t>(i)] =
            harvest_one(plan.params, n_steps, plan.dt,
                        derive_seed(plan.master_seed, plan.row,
                                    static_cast<std::uint64_t>(i)));
    std::vector<CycleRecord> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

} // namespace epo
