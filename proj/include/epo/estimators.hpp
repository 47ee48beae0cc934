#pragma once

#include <cstddef>
#include <vector>

#include "epo/cycles.hpp"
#include "epo/errors.hpp"

namespace epo {

// Compensated (Kahan) sum over a fixed order; keeps aggregate results
// reproducible to the last bit for a given input sequence.
inline double kahan_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

struct EstimateWithCI {
    double value = 0.0;
    double sample_std = 0.0; // population form sqrt(m2 - m1^2)
    std::size_t n = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// mean with 95% normal CI, population (uncorrected) standard deviation
EstimateWithCI ci_95(const std::vector<double>& samples);

// (1/T) * mean of squared window integrals, CI from the matching
// fourth-moment spread: s_X = sqrt(mean(I^4)/T^2 - value^2).
EstimateWithCI direct_variance_estimator(const std::vector<double>& window_integrals,
                                         double T);
EstimateWithCI direct_variance_estimator(const std::vector<Trajectory>& trajectories,
                                         double T, double dt);

struct CycleDriftResult {
    EstimateWithCI ratio; // delta/tau with the conservative ratio CI
    EstimateWithCI delta; // mean squared full-cycle integral
    EstimateWithCI tau;   // mean cycle duration
};

// ratio of mean squared full-cycle integral to mean duration; the CI takes
// the worst pairing of the numerator and denominator CIs, so it always
// contains the plain ratio.
CycleDriftResult cycle_drift_estimator(const std::vector<CycleRecord>& cycles);

// [mean(h^2) - mean(h)^2] / mean(half duration), h the orientation-aligned
// half-cycle integral (sign-flipped for s = -1). CI by worst-case interval
// arithmetic over the three component CIs.
EstimateWithCI half_cycle_estimator(const std::vector<CycleRecord>& cycles);

// mean of the window integrals with CI; the check passes iff 0 is inside
EstimateWithCI mean_zero_check(const std::vector<double>& window_integrals);
EstimateWithCI mean_zero_check(const std::vector<Trajectory>& trajectories, double T);

struct DriftReport {
    double Y = 0.0, c0 = 0.0, k = 0.0;
    double T = 0.0, dt = 0.0;
    std::size_t MC = 0;
    EstimateWithCI lhs;        // direct window estimator
    EstimateWithCI rhs;        // cycle ratio
    EstimateWithCI tau_mean;   // mean cycle duration
    EstimateWithCI simplified; // half-cycle formula
    double rel_err_pct = 0.0;  // 100*|lhs - rhs|/rhs
};

} // namespace epo
