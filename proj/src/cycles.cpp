#include "epo/cycles.hpp"

namespace epo {

std::vector<BoundaryRestEvent> detect_boundary_rest_events(const Trajectory& tr) {
    std::vector<BoundaryRestEvent> out;
    RestDetector det;
    for (std::size_t n = 0; n < tr.states.size(); ++n) {
        if (auto ev = det.feed(tr.states[n], static_cast<std::int64_t>(n)))
            out.push_back(*ev);
    }
    return out;
}

std::vector<CycleRecord> extract_cycles(const std::vector<BoundaryRestEvent>& events,
                                        const Trajectory& tr) {
    // prefix[n] = sum_{m<n} y_m * dt, so integrals between event indices are
    // plain differences
    std::vector<double> prefix(tr.states.size() + 1, 0.0);
    for (std::size_t n = 0; n < tr.states.size(); ++n)
        prefix[n + 1] = prefix[n] + tr.states[n].y * tr.dt;
    auto integral_at = [&](std::int64_t idx) { return prefix[static_cast<std::size_t>(idx)]; };

    std::vector<CycleRecord> out;
    bool open = false, have_mid = false;
    int s = 0;
    double t0 = 0.0, tm = 0.0, i0 = 0.0, im = 0.0;
    for (const auto& ev : events) {
        if (!open) {
            open = true;
            s = ev.side;
            t0 = ev.t;
            i0 = integral_at(ev.index);
        } else if (!have_mid && ev.side == -s) {
            have_mid = true;
            tm = ev.t;
            im = integral_at(ev.index);
        } else if (have_mid && ev.side == s) {
            CycleRecord c;
            c.s = s;
            c.t_start = t0;
            c.t_mid = tm;
            c.t_end = ev.t;
            c.duration = ev.t - t0;
            c.half_integral = im - i0;
            c.full_integral = integral_at(ev.index) - i0;
            out.push_back(c);
            t0 = ev.t;
            i0 = integral_at(ev.index);
            have_mid = false;
        }
        // same-side repeats in either wait state are absorbed
    }
    return out;
}

std::vector<double> accumulate_plastic(const Trajectory& tr) {
    std::vector<double> delta(tr.states.size(), 0.0);
    double acc = 0.0;
    for (std::size_t n = 1; n < tr.states.size(); ++n) {
        if (is_plastic(tr.states[n])) acc += tr.states[n - 1].y * tr.dt;
        delta[n] = acc;
    }
    return delta;
}

} // namespace epo
