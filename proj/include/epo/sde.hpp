#pragma once

#include <cstdint>
#include <vector>

#include "epo/params.hpp"
#include "epo/rng.hpp"

namespace epo {

enum class Regime : std::uint8_t { Elastic, PlasticPlus, PlasticMinus };

inline const char* regime_name(Regime r) {
    switch (r) {
    case Regime::Elastic: return "elastic";
    case Regime::PlasticPlus: return "plastic+";
    case Regime::PlasticMinus: return "plastic-";
    }
    return "?";
}

struct State {
    double t = 0.0;
    double y = 0.0; // velocity
    double z = 0.0; // elastic component, |z| <= Y
    Regime regime = Regime::Elastic;
};

inline Regime regime_of(double z, double Y) {
    if (z >= Y) return Regime::PlasticPlus;
    if (z <= -Y) return Regime::PlasticMinus;
    return Regime::Elastic;
}

// One projected Euler step:
//   y' = y - (c0*y + k*z)*dt + dW        (drift from the pre-step z)
//   z' = clamp(z + y*dt, [-Y, Y])
// A step is plastic iff the post-step z sits on a bound; the plastic
// deformation accumulator picks up the pre-step y*dt on exactly those steps.
inline State euler_step(const OscillatorParams& p, const State& s, double dW,
                        double dt) {
    if (!(s.z >= -p.Y && s.z <= p.Y))
        fail(errc::invalid_state, "input state has |z| > Y");
    State n;
    n.t = s.t + dt;
    n.y = s.y - (p.c0 * s.y + p.k * s.z) * dt + dW;
    double zp = s.z + s.y * dt;
    if (zp > p.Y) zp = p.Y;
    if (zp < -p.Y) zp = -p.Y;
    n.z = zp;
    n.regime = regime_of(zp, p.Y);
    return n;
}

// Plastic indicator of a state (post-step convention).
inline bool is_plastic(const State& s) { return s.regime != Regime::Elastic; }

// Coarse steps can hop across the whole strip in one go and break the
// projection's meaning; reject dt large enough that a 6-sigma velocity
// would cross a tenth of the bound per step.
inline void check_dt_guard(const OscillatorParams& p, double dt) {
    const double y_ref = 6.0 / std::sqrt(2.0 * p.c0);
    if (!(dt > 0.0) || y_ref * dt >= p.Y / 10.0)
        fail(errc::config_invalid, "dt too coarse for bound Y (need 6/sqrt(2 c0)*dt < Y/10)");
}

// Streaming simulation core. Obs is called after every step as
// obs(state, delta) where delta is the accumulated plastic deformation.
// Returns the final state. Constant memory; nothing is materialized.
template <class Noise, class Obs>
State simulate_stream(const OscillatorParams& p, State s, std::size_t n_steps,
                      double dt, Noise&& noise, Obs&& obs, double& delta) {
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double y_pre = s.y;
        const State nx = euler_step(p, s, noise(), dt);
        if (is_plastic(nx)) delta += y_pre * dt;
        s = nx;
        obs(s, delta);
    }
    return s;
}

struct Trajectory {
    OscillatorParams params;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<State> states; // t = n*dt, n = 0..N
    std::vector<double> delta; // plastic deformation at each grid time
};

// Materialized simulation from a given initial state (default rest at the
// origin). N = ceil(T/dt) steps; states[0] is the initial state.
Trajectory simulate_trajectory(const OscillatorParams& p, double T, double dt,
                               std::uint64_t seed, State init = State{});

// Exact flow of the linear (no contact) dynamics from (y0, z0) over time
// t = increments.size()*dt, with the stochastic convolution integrals
// evaluated by left-endpoint sums over the same increments the Euler
// scheme consumes. Test oracle for the elastic phase.
State elastic_flow_exact(const OscillatorParams& p, double y0, double z0,
                         double dt, const std::vector<double>& increments);

} // namespace epo
