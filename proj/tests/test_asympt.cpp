#include <doctest.h>

#include <cmath>
#include <vector>

#include "renew/asympt.hpp"
#include "renew/laws.hpp"
#include "renew/series.hpp"
#include "renew/spectral.hpp"

using namespace renew;

TEST_CASE("two-point rate is log 2 with alternating sign") {
    const PrecisionSpec prec = PrecisionSpec::exact(256);
    const TiltedLaw t = tilt(InterArrivalLaw::table({0.5, 0.5}), 0.0, prec, 120);
    const RateReport r = decay_rate(delta_series(t, 120, prec));
    CHECK(r.rate == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(r.oscillatory);
    CHECK(r.fit_r2 > 0.999999);
}

TEST_CASE("power-family rate matches the tilt below the critical point") {
    for (double b : {0.25, 0.5}) {
        const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), b, {}, 1500);
        const RateReport r = decay_rate(delta_series(t, 1500));
        CHECK(std::abs(r.rate / b - 1) < 0.02);
        CHECK_FALSE(r.oscillatory);
        CHECK(r.fit_r2 > 0.99999);
    }
}

TEST_CASE("above the critical tilt the rate is log|z0|, strictly below b") {
    // single real root: the alternating-sign fit is unbiased and nails the
    // modulus to many digits
    const TiltedLaw t1 = tilt(InterArrivalLaw::shifted(0.5, 1), 0.5, {}, 1500);
    const double lz1 = std::log(find_roots(t1)[0].modulus);
    const RateReport r1 = decay_rate(delta_series(t1, 1500));
    CHECK(r1.rate == doctest::Approx(0.1757460991).epsilon(1e-8));
    CHECK(std::abs(r1.rate / lz1 - 1) < 1e-8);
    CHECK(r1.rate < 0.5);
    CHECK(r1.oscillatory);

    // conjugate pair: the near-zero dips force the envelope fit
    const TiltedLaw t2 = tilt(InterArrivalLaw::shifted(0.5, 2), 0.5, {}, 1500);
    const double lz2 = std::log(find_roots(t2)[0].modulus);
    const RateReport r2 = decay_rate(delta_series(t2, 1500));
    CHECK(r2.envelope_used);
    CHECK(r2.oscillatory);
    CHECK(std::abs(r2.rate / lz2 - 1) < 0.03);
    CHECK(r2.rate < 0.5);
}

TEST_CASE("sharp-constant ratio d(n)(c-1)^2/K_b(n) walks toward 1") {
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), 0.5, {}, 1000);
    const RenewalSeries s = delta_series(t, 1000);
    const double r250 = sharp_ratio(s, t, 250);
    const double r500 = sharp_ratio(s, t, 500);
    const double r1000 = sharp_ratio(s, t, 1000);
    CHECK(r250 == doctest::Approx(0.9850392334).epsilon(1e-8));
    CHECK(r500 == doctest::Approx(0.9924485327).epsilon(1e-8));
    CHECK(r1000 == doctest::Approx(0.9962061365).epsilon(1e-8));
    CHECK(std::abs(r1000 - 1) < std::abs(r500 - 1));
    CHECK(std::abs(r500 - 1) < std::abs(r250 - 1));
}

TEST_CASE("sharp-constant ratio at alpha = 1/4: slow but monotone approach") {
    // the correction decays like n^{-1/4} here, so the ratio is still far
    // from 1 at reachable n; the trend is what the theory pins down
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.25), 0.5, {}, 1000);
    const RenewalSeries s = delta_series(t, 1000);
    const double r250 = sharp_ratio(s, t, 250);
    const double r500 = sharp_ratio(s, t, 500);
    const double r1000 = sharp_ratio(s, t, 1000);
    CHECK(r250 == doctest::Approx(1.5210412311).epsilon(1e-8));
    CHECK(r500 == doctest::Approx(1.4320068844).epsilon(1e-8));
    CHECK(r1000 == doctest::Approx(1.3571076543).epsilon(1e-8));
    CHECK(r1000 > 1.0);
    CHECK(r1000 < r500);
    CHECK(r500 < r250);
}

TEST_CASE("memoryless law: the sharp ratio reports an exact-zero signal") {
    const TiltedLaw t = tilt(InterArrivalLaw::geometric(0.5), 0.3, {}, 40);
    const RenewalSeries s = delta_series(t, 40);
    CHECK(std::abs(sharp_ratio(s, t, 20)) < 1e-10);
}

TEST_CASE("gradient ratio tends to 1 and u decreases from above") {
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), 0.5, {}, 1000);
    const RenewalSeries s = delta_series(t, 1000);
    CHECK(grad_ratio(s, t, 250) == doctest::Approx(1.01518799055).epsilon(1e-8));
    CHECK(grad_ratio(s, t, 500) == doctest::Approx(1.00760892584).epsilon(1e-8));
    CHECK(grad_ratio(s, t, 1000) == doctest::Approx(1.00380831176).epsilon(1e-8));
    CHECK(s.grad_at(500) < 0);
    CHECK(s.d_at(500) > 0);
}

TEST_CASE("occupation-density hypotheses: step ratio and self-convolution") {
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), 0.5, {}, 1000);
    ScopedPrecision scope(t.precision_bits);
    std::vector<Real> mu;
    mu_densities(t, 1000, mu);
    const double step = static_cast<double>(mu[501] / mu[500]);
    CHECK(step == doctest::Approx(0.60472379631).epsilon(1e-9));
    CHECK(std::abs(step / std::exp(-0.5) - 1) < 0.01);

    Real conv(0);
    for (long j = 0; j <= 500; ++j)
        conv += mu[j] * mu[500 - j];
    const double ratio = static_cast<double>(conv / mu[500]);
    const double limit = 2 * (t.c() - 1) / (t.m() * (std::exp(0.5) - 1));
    CHECK(ratio == doctest::Approx(3.96994430601).epsilon(1e-9));
    CHECK(std::abs(ratio / limit - 1) < 0.03);
}

TEST_CASE("correlation function: unit at lag 0, closed form at lag 1") {
    const TiltedLaw two = tilt(InterArrivalLaw::table({0.5, 0.5}), 0.0, {}, 10);
    const RenewalSeries s = mass_renewal(two, 10);
    CHECK(correlation_fn(s, two, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(correlation_fn(s, two, 1) == doctest::Approx(-0.5).epsilon(1e-13));

    const TiltedLaw ba = tilt(InterArrivalLaw::basic(0.5), 0.5, {}, 10);
    const RenewalSeries sb = mass_renewal(ba, 10);
    CHECK(correlation_fn(sb, ba, 0) == doctest::Approx(1.0).epsilon(1e-13));

    const TiltedLaw deg = tilt(InterArrivalLaw::table({1.0}), 0.5, {}, 10);
    const RenewalSeries sd = mass_renewal(deg, 10);
    CHECK_THROWS_AS(correlation_fn(sd, deg, 3), domain_error);
}

TEST_CASE("correlation length: two-point closed form and tilt halving") {
    CHECK(correlation_length(InterArrivalLaw::table({0.5, 0.5}), 0.0, 80) ==
          doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-6));

    const double xi4 = correlation_length(InterArrivalLaw::basic(0.5), 0.4, 600);
    const double xi2 = correlation_length(InterArrivalLaw::basic(0.5), 0.2, 1500);
    CHECK(std::abs(xi2 / (2 * xi4) - 1) < 0.02);
}

TEST_CASE("scaling scan: b * xi(b) approaches 1 from below") {
    const std::vector<XiPoint> pts = xi_scan(InterArrivalLaw::basic(0.5), {0.4, 0.2});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].b_times_xi == doctest::Approx(0.9849579069).epsilon(1e-8));
    CHECK(pts[1].b_times_xi == doctest::Approx(0.9892952559).epsilon(1e-8));
    CHECK(std::abs(pts[1].b_times_xi - 1) < std::abs(pts[0].b_times_xi - 1));
    CHECK(pts[0].n_max == 514);
    CHECK(pts[1].n_max == 1454);
    CHECK(xi_scan(InterArrivalLaw::basic(0.5), {}).empty());
}

TEST_CASE("scan horizon rule clamps at both ends") {
    CHECK(xi_default_n_max(0.4) == 514);
    CHECK(xi_default_n_max(2.0) == 300);
    CHECK(xi_default_n_max(0.01) == 12000);
    CHECK_THROWS_AS(xi_default_n_max(0.0), domain_error);
}

TEST_CASE("rate-fit guard rails") {
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), 0.5, {}, 30);
    const RenewalSeries s = delta_series(t, 30);
    CHECK_THROWS_AS(decay_rate(s), insufficient_data_error);
    const TiltedLaw t2 = tilt(InterArrivalLaw::basic(0.5), 0.5, {}, 200);
    const RenewalSeries s2 = delta_series(t2, 200);
    CHECK_THROWS_AS(decay_rate(s2, 150, 80), domain_error);
    CHECK_THROWS_AS(decay_rate(s2, 10, 900), domain_error);
    const RateReport r = decay_rate(s2);
    CHECK(r.n_lo == 50);
    CHECK(r.n_hi == 150);

    // degenerate renewal never leaves the plateau: d vanishes identically
    CHECK_THROWS_AS(correlation_length(InterArrivalLaw::table({1.0}), 0.5, 200),
                    insufficient_data_error);
}
