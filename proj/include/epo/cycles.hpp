#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epo/sde.hpp"

namespace epo {

// Rest event at a bound: velocity sign change (or exact zero hit) while the
// elastic component is pinned at side*Y.
struct BoundaryRestEvent {
    double t = 0.0;
    int side = 0; // +1 at z = +Y, -1 at z = -Y
    std::int64_t index = 0;
};

// Streaming detector. Feed successive states; an event fires on the first
// step where z is pinned on a side and y has crossed (or reached) zero from
// the outward direction. After an event, the same side re-arms only once an
// interior (|z| < Y) step has been seen, which suppresses chattering from
// numerical jitter around y = 0.
class RestDetector {
public:
    void reset() { *this = RestDetector{}; }

    std::optional<BoundaryRestEvent> feed(const State& s, std::int64_t index) {
        std::optional<BoundaryRestEvent> out;
        if (s.regime == Regime::Elastic) {
            armed_plus_ = armed_minus_ = true;
        } else if (have_prev_) {
            const int side = (s.regime == Regime::PlasticPlus) ? +1 : -1;
            bool& armed = (side > 0) ? armed_plus_ : armed_minus_;
            const double out_prev = side * prev_y_;
            const double out_now = side * s.y;
            if (armed && out_prev > 0.0 && out_now <= 0.0) {
                out = BoundaryRestEvent{s.t, side, index};
                armed = false;
            }
        }
        prev_y_ = s.y;
        have_prev_ = true;
        return out;
    }

private:
    double prev_y_ = 0.0;
    bool have_prev_ = false;
    bool armed_plus_ = true;
    bool armed_minus_ = true;
};

// One long cycle: start at a rest on side s, first rest on the opposite side
// at t_mid, first return to a side-s rest at t_end.
struct CycleRecord {
    int s = 0;
    double t_start = 0.0, t_mid = 0.0, t_end = 0.0;
    double duration = 0.0;
    double half_integral = 0.0; // int y dt over [t_start, t_mid)
    double full_integral = 0.0; // int y dt over [t_start, t_end)
};

std::vector<BoundaryRestEvent> detect_boundary_rest_events(const Trajectory& tr);

// Build cycles from time-sorted events: the first event fixes tau0 and the
// orientation; same-side repeats before the opposite rest are absorbed; the
// transient before tau0 and an incomplete final cycle are dropped.
// Integrals are left-endpoint sums of y*dt between event indices.
std::vector<CycleRecord> extract_cycles(const std::vector<BoundaryRestEvent>& events,
                                        const Trajectory& tr);

// Plastic deformation series recomputed from the states (the simulator keeps
// its own running sum; this one exists to cross-check it).
std::vector<double> accumulate_plastic(const Trajectory& tr);

// Streaming counterpart of detect+extract for constant-memory harvesting:
// feed states step by step, completed cycles come out at most one per feed.
class CycleHarvester {
public:
    // Treat the stream start as an already-established rest on `side`
    // (used when a trajectory begins exactly at a bound rest state).
    void open_at(int side, double t) {
        open_ = true;
        s_ = side;
        t0_ = t;
        i0_ = 0.0;
        have_mid_ = false;
    }

    // Call with consecutive indices starting at 0 (the initial state).
    std::optional<CycleRecord> feed(const State& s, std::int64_t index, double dt) {
        // integral_ becomes the left-endpoint prefix sum of y*dt up to s
        if (index > 0) integral_ += prev_y_ * dt;
        prev_y_ = s.y;
        auto ev = det_.feed(s, index);
        std::optional<CycleRecord> done;
        if (ev) {
            const double at = integral_;
            if (!open_) {
                open_ = true;
                s_ = ev->side;
                t0_ = ev->t;
                i0_ = at;
                have_mid_ = false;
            } else if (!have_mid_ && ev->side == -s_) {
                have_mid_ = true;
                tm_ = ev->t;
                im_ = at;
            } else if (have_mid_ && ev->side == s_) {
                CycleRecord c;
                c.s = s_;
                c.t_start = t0_;
                c.t_mid = tm_;
                c.t_end = ev->t;
                c.duration = ev->t - t0_;
                c.half_integral = im_ - i0_;
                c.full_integral = at - i0_;
                done = c;
                // next cycle starts at this rest
                t0_ = ev->t;
                i0_ = at;
                have_mid_ = false;
            }
        }
        return done;
    }

    bool cycle_open() const { return open_; }

private:
    RestDetector det_;
    double integral_ = 0.0;
    double prev_y_ = 0.0;
    bool open_ = false;
    int s_ = 0;
    bool have_mid_ = false;
    double t0_ = 0.0, tm_ = 0.0;
    double i0_ = 0.0, im_ = 0.0;
};

} // namespace epo
