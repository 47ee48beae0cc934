#include "epo/sde.hpp"

#include <cmath>

namespace epo {

Trajectory simulate_trajectory(const OscillatorParams& p, double T, double dt,
                               std::uint64_t seed, State init) {
    if (!(T > 0.0)) fail(errc::config_invalid, "require T > 0");
    check_dt_guard(p, dt);
    const auto n_steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));

    Trajectory tr;
    tr.params = p;
    tr.dt = dt;
    tr.seed = seed;
    tr.states.reserve(n_steps + 1);
    tr.delta.reserve(n_steps + 1);
    init.regime = regime_of(init.z, p.Y);
    tr.states.push_back(init);
    tr.delta.push_back(0.0);

    NormalStream g(seed);
    const double sq = std::sqrt(dt);
    double delta = 0.0;
    simulate_stream(
        p, init, n_steps, dt, [&] { return sq * g.next(); },
        [&](const State& s, double d) {
            tr.states.push_back(s);
            tr.delta.push_back(d);
        },
        delta);
    return tr;
}

State elastic_flow_exact(const OscillatorParams& p, double y0, double z0,
                         double dt, const std::vector<double>& increments) {
    const double a = p.c0 / 2.0;
    const double w = p.omega;
    const double t = static_cast<double>(increments.size()) * dt;

    // homogeneous part: damped rotation of (z, y)
    const double e = std::exp(-a * t);
    const double c = std::cos(w * t), s = std::sin(w * t);
    double z = e * (z0 * c + (y0 + a * z0) / w * s);
    double y = e * (y0 * c - (p.k * z0 + a * y0) / w * s);

    // stochastic convolutions, left-endpoint sums:
    //   z += (1/w) sum e^{-a(t-s_m)} sin(w(t-s_m)) dW_m
    //   y += sum e^{-a(t-s_m)} [cos(w(t-s_m)) - (a/w) sin(w(t-s_m))] dW_m
    for (std::size_t m = 0; m < increments.size(); ++m) {
        const double u = t - static_cast<double>(m) * dt;
        const double eu = std::exp(-a * u);
        const double su = std::sin(w * u), cu = std::cos(w * u);
        z += eu * su / w * increments[m];
        y += eu * (cu - a / w * su) * increments[m];
    }

    State out;
    out.t = t;
    out.y = y;
    out.z = z;
    out.regime = regime_of(z, p.Y);
    return out;
}

} // namespace epo
