#include "epo/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace epo {

namespace {

void require_n(std::size_t n, std::size_t need, const char* what) {
    if (n < need) fail(errc::insufficient_samples, what);
}

double window_integral(const Trajectory& tr) {
    double s = 0.0, c = 0.0;
    for (std::size_t n = 0; n + 1 < tr.states.size(); ++n) {
        const double x = tr.states[n].y * tr.dt;
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

} // namespace

EstimateWithCI ci_95(const std::vector<double>& samples) {
    require_n(samples.size(), 2, "ci_95 needs at least 2 samples");
    const auto n = samples.size();
    const double m1 = kahan_sum(samples) / static_cast<double>(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = samples[i] * samples[i];
    const double m2 = kahan_sum(sq) / static_cast<double>(n);
    const double var = std::max(m2 - m1 * m1, 0.0);
    const double sd = std::sqrt(var);
    const double hw = 1.96 * sd / std::sqrt(static_cast<double>(n));
    return {m1, sd, n, m1 - hw, m1 + hw};
}

EstimateWithCI direct_variance_estimator(const std::vector<double>& window_integrals,
                                         double T) {
    require_n(window_integrals.size(), 2, "direct estimator needs MC >= 2");
    const auto n = window_integrals.size();
    std::vector<double> x2(n), x4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = window_integrals[i] * window_integrals[i];
        x2[i] = q / T;
        x4[i] = q * q / (T * T);
    }
    const double X = kahan_sum(x2) / static_cast<double>(n);
    const double X2 = kahan_sum(x4) / static_cast<double>(n);
    const double sd = std::sqrt(std::max(X2 - X * X, 0.0));
    const double hw = 1.96 * sd / std::sqrt(static_cast<double>(n));
    return {X, sd, n, X - hw, X + hw};
}

EstimateWithCI direct_variance_estimator(const std::vector<Trajectory>& trajectories,
                                         double T, double /*dt*/) {
    std::vector<double> ints(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i)
        ints[i] = window_integral(trajectories[i]);
    return direct_variance_estimator(ints, T);
}

CycleDriftResult cycle_drift_estimator(const std::vector<CycleRecord>& cycles) {
    require_n(cycles.size(), 2, "cycle estimator needs >= 2 cycles");
    const auto n = cycles.size();
    std::vector<double> j2(n), dur(n);
    for (std::size_t i = 0; i < n; ++i) {
        j2[i] = cycles[i].full_integral * cycles[i].full_integral;
        dur[i] = cycles[i].duration;
    }
    CycleDriftResult r;
    r.delta = ci_95(j2);
    r.tau = ci_95(dur);

    const double ratio = r.delta.value / r.tau.value;
    const double tau_lo = std::max(r.tau.ci_low, 1e-300);
    r.ratio.value = ratio;
    r.ratio.sample_std = r.delta.sample_std / r.tau.value;
    r.ratio.n = n;
    r.ratio.ci_low = r.delta.ci_low / r.tau.ci_high;
    r.ratio.ci_high = r.delta.ci_high / tau_lo;
    return r;
}

EstimateWithCI half_cycle_estimator(const std::vector<CycleRecord>& cycles) {
    require_n(cycles.size(), 2, "half-cycle estimator needs >= 2 cycles");
    const auto n = cycles.size();
    std::vector<double> h(n), h2(n), th(n);
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = cycles[i].s * cycles[i].half_integral; // orientation-aligned
        h2[i] = h[i] * h[i];
        th[i] = cycles[i].t_mid - cycles[i].t_start;
    }
    const auto A = ci_95(h2); // E (int y)^2 over half-cycles
    const auto M = ci_95(h);  // E int y
    const auto C = ci_95(th); // E theta

    const double value = (A.value - M.value * M.value) / C.value;

    // worst-case interval arithmetic
    const double m_lo2 = (M.ci_low <= 0.0 && M.ci_high >= 0.0)
                             ? 0.0
                             : std::min(M.ci_low * M.ci_low, M.ci_high * M.ci_high);
    const double m_hi2 = std::max(M.ci_low * M.ci_low, M.ci_high * M.ci_high);
    const double num_lo = A.ci_low - m_hi2;
    const double num_hi = A.ci_high - m_lo2;
    const double c_lo = std::max(C.ci_low, 1e-300);
    const double lo = std::min(num_lo / c_lo, num_lo / C.ci_high);
    const double hi = std::max(num_hi / c_lo, num_hi / C.ci_high);

    EstimateWithCI out;
    out.value = value;
    out.sample_std = A.sample_std / C.value;
    out.n = n;
    out.ci_low = lo;
    out.ci_high = hi;
    return out;
}

EstimateWithCI mean_zero_check(const std::vector<double>& window_integrals) {
    return ci_95(window_integrals);
}

EstimateWithCI mean_zero_check(const std::vector<Trajectory>& trajectories, double) {
    std::vector<double> ints(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i)
        ints[i] = window_integral(trajectories[i]);
    return ci_95(ints);
}

} // namespace epo
