#include <doctest.h>

#include <cmath>

#include "epo/estimators.hpp"
#include "epo/mc_driver.hpp"

using namespace epo;

namespace {

CycleRecord cyc(double full, double dur, double half = 0.0, int s = 1) {
    CycleRecord c;
    c.s = s;
    c.t_start = 0.0;
    c.t_mid = dur / 2.0;
    c.t_end = dur;
    c.duration = dur;
    c.half_integral = half;
    c.full_integral = full;
    return c;
}

} // namespace

TEST_CASE("kahan sum survives cancellation") {
    CHECK(kahan_sum({1e16, 1.0, -1e16}) == 1.0);
    CHECK(kahan_sum({}) == 0.0);
    std::vector<double> xs;
    long double ref = 0.0L;
    for (int i = 0; i < 1000; ++i) {
        const double v = std::sin(i) * std::pow(10.0, i % 14);
        xs.push_back(v);
        ref += v;
    }
    CHECK(kahan_sum(xs) == doctest::Approx(double(ref)).epsilon(1e-14));
}

TEST_CASE("mean with normal confidence interval") {
    const auto c = ci_95({1.0, 1.0, 1.0, 1.0});
    CHECK(c.value == 1.0);
    CHECK(c.sample_std == 0.0);
    CHECK(c.ci_low == 1.0);
    CHECK(c.ci_high == 1.0);
    CHECK(c.n == 4);

    const auto d = ci_95({0.0, 2.0}); // population std = 1
    CHECK(d.value == 1.0);
    CHECK(d.sample_std == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.ci_low == doctest::Approx(1.0 - 1.96 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(d.ci_high == doctest::Approx(1.0 + 1.96 / std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(ci_95({}), error);
    CHECK_THROWS_AS(ci_95({1.0}), error);
}

TEST_CASE("direct window-variance estimator") {
    // |I| = sqrt(T) for every window: value exactly 1, zero spread
    const double T = 4.0;
    const auto e = direct_variance_estimator({2.0, -2.0, 2.0, -2.0}, T);
    CHECK(e.value == 1.0);
    CHECK(e.sample_std == 0.0);
    CHECK(e.ci_low == 1.0);
    CHECK(e.ci_high == 1.0);

    // fourth-moment spread: I^2 in {0, 8} gives X = 1, X2 = 2, s_X = 1
    const auto f = direct_variance_estimator({0.0, std::sqrt(8.0)}, T);
    CHECK(f.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.sample_std == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.ci_high == doctest::Approx(1.0 + 1.96 / std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(direct_variance_estimator({1.0}, T), error);
}

TEST_CASE("cycle ratio estimator with conservative interval") {
    // two cycles, integrals +-2 over duration 4: ratio (4+4)/2 / 4 = 1 sharp
    const auto r = cycle_drift_estimator({cyc(2.0, 4.0), cyc(-2.0, 4.0)});
    CHECK(r.ratio.value == 1.0);
    CHECK(r.delta.value == 4.0);
    CHECK(r.tau.value == 4.0);
    CHECK(r.ratio.ci_low == 1.0);
    CHECK(r.ratio.ci_high == 1.0);
    CHECK(r.tau.ci_low == 4.0);

    // worst-pairing interval endpoints, written out
    const auto q = cycle_drift_estimator({cyc(2.0, 3.0), cyc(-4.0, 5.0)});
    const double dm = 10.0, tm = 4.0, sd = 6.0, st = 1.0; // moments by hand
    CHECK(q.delta.value == doctest::Approx(dm).epsilon(1e-15));
    CHECK(q.delta.sample_std == doctest::Approx(sd).epsilon(1e-12));
    CHECK(q.tau.sample_std == doctest::Approx(st).epsilon(1e-12));
    const double rad_d = 1.96 * sd / std::sqrt(2.0), rad_t = 1.96 * st / std::sqrt(2.0);
    CHECK(q.ratio.ci_low == doctest::Approx((dm - rad_d) / (tm + rad_t)).epsilon(1e-12));
    CHECK(q.ratio.ci_high == doctest::Approx((dm + rad_d) / (tm - rad_t)).epsilon(1e-12));
    // conservative: always contains the plain ratio
    CHECK(q.ratio.ci_low <= q.ratio.value);
    CHECK(q.ratio.value <= q.ratio.ci_high);

    CHECK_THROWS_AS(cycle_drift_estimator({cyc(1.0, 2.0)}), error);
}

TEST_CASE("half-cycle variance-over-duration estimator") {
    // aligned halves 1 and 3 over half-durations 2: (5 - 4) / 2
    std::vector<CycleRecord> cs = {cyc(0.0, 4.0, 1.0, +1), cyc(0.0, 4.0, -3.0, -1)};
    const auto e = half_cycle_estimator(cs);
    CHECK(e.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.ci_low <= e.value);
    CHECK(e.value <= e.ci_high);

    CHECK_THROWS_AS(half_cycle_estimator({cyc(1.0, 2.0, 1.0)}), error);
}

TEST_CASE("estimators are invariant under a global sign flip") {
    std::vector<CycleRecord> a, b;
    for (int i = 0; i < 7; ++i) {
        const double full = 0.3 * i - 1.0, half = 0.2 * i - 0.7, dur = 2.0 + 0.5 * i;
        const int s = (i % 2) ? 1 : -1;
        a.push_back(cyc(full, dur, half, s));
        b.push_back(cyc(-full, dur, -half, -s));
    }
    const auto ra = cycle_drift_estimator(a), rb = cycle_drift_estimator(b);
    CHECK(ra.ratio.value == rb.ratio.value);
    CHECK(ra.ratio.ci_low == rb.ratio.ci_low);
    CHECK(ra.ratio.ci_high == rb.ratio.ci_high);
    CHECK(ra.tau.value == rb.tau.value);
    const auto ha = half_cycle_estimator(a), hb = half_cycle_estimator(b);
    CHECK(ha.value == hb.value);
    CHECK(ha.ci_low == hb.ci_low);
    CHECK(ha.ci_high == hb.ci_high);

    const auto da = direct_variance_estimator({1.5, -0.3, 0.7}, 2.0);
    const auto db = direct_variance_estimator({-1.5, 0.3, -0.7}, 2.0);
    CHECK(da.value == db.value);
    CHECK(da.ci_low == db.ci_low);
}

TEST_CASE("mean-zero drift check") {
    const auto e = mean_zero_check({-1.0, 1.0, -2.0, 2.0});
    CHECK(e.value == 0.0);
    CHECK(e.ci_low <= 0.0);
    CHECK(e.ci_high >= 0.0);

    const auto biased = mean_zero_check({5.0, 5.1, 4.9, 5.0});
    CHECK(biased.ci_low > 0.0); // clearly not centered
}

TEST_CASE("half cycles are uncorrelated across the mid rest") {
    const auto p = validate_params(1.0, 1.0, 0.5);
    const McPlan plan{p, 100.0, 1e-3, 60, 23, 0};
    const auto cycles = harvest_cycles_serial(plan);
    REQUIRE(cycles.size() >= 200);
    // first and second half integrals, orientation-aligned
    std::vector<double> x, y;
    for (const auto& c : cycles) {
        x.push_back(c.s * c.half_integral);
        y.push_back(c.s * (c.full_integral - c.half_integral));
    }
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    CHECK(std::abs(corr) < 0.2); // ~4/sqrt(n) at n ~ 400
}
