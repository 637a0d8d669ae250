#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "renew/laws.hpp"
#include "renew/precision.hpp"

using namespace renew;

namespace {
const double kLn2 = 0.6931471805599453;
const double kSqrt2 = 1.4142135623730951;
} // namespace

TEST_CASE("basic law: alpha = 1/2 head is 1/2, 1/8, 1/16, 5/128") {
    const InterArrivalLaw law = InterArrivalLaw::basic(0.5);
    CHECK(law.density(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(law.density(2) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(law.density(3) == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(law.density(4) == doctest::Approx(0.0390625).epsilon(1e-14));
    CHECK(law.support_start() == 1);
    CHECK(law.support_end() == -1);
    CHECK_FALSE(law.finite_mean());
}

TEST_CASE("power-tail normalization: n^{1+a} K(n) approaches -1/Gamma(-a)") {
    for (double alpha : {0.25, 0.5, 0.75}) {
        const InterArrivalLaw law = InterArrivalLaw::basic(alpha);
        const double n = 10000;
        const double scaled =
            std::pow(n, 1 + alpha) * law.density(10000) * (-std::tgamma(-alpha));
        CHECK(scaled > 0.98);
        CHECK(scaled < 1.02);
    }
}

TEST_CASE("tail telescopes: tail(n) - tail(n+1) = K(n+1), tail(0) = 1") {
    const std::vector<InterArrivalLaw> laws{
        InterArrivalLaw::basic(0.5),
        InterArrivalLaw::shifted(0.3, 2),
        InterArrivalLaw::logcorrected(0.5, 1),
        InterArrivalLaw::table({0.2, 0.3, 0.5}),
        InterArrivalLaw::table({0.25, 0.375}, 0.5),
        InterArrivalLaw::geometric(0.7),
    };
    for (const InterArrivalLaw& law : laws) {
        CHECK(law.tail(0) == doctest::Approx(1.0).epsilon(1e-12));
        for (long n : {1L, 5L, 30L}) {
            const double diff = law.tail(n) - law.tail(n + 1);
            CHECK(diff == doctest::Approx(law.density(n + 1)).epsilon(1e-10));
        }
    }
}

TEST_CASE("invalid laws are rejected") {
    CHECK_THROWS_AS(InterArrivalLaw::basic(0.0), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::basic(1.0), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::shifted(0.5, -1), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::logcorrected(0.5, -1), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::table({}), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::table({0.5, -0.1, 0.6}), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::table({0.5, 0.4}), domain_error);
    // all mass on even sites: period 2
    CHECK_THROWS_AS(InterArrivalLaw::table({0.0, 1.0}), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::table({0.5, 0.5}, 1.0), domain_error);
    CHECK_THROWS_AS(InterArrivalLaw::geometric(1.0), domain_error);
    // support {2,3} has gcd 1: fine
    CHECK_NOTHROW(InterArrivalLaw::table({0.0, 0.5, 0.5}));
}

TEST_CASE("tilt normalizer, closed forms: basic alpha = 1/2 at b = log 2") {
    // sum K(n) e^{-bn} = 1 - (1 - e^{-b})^{1/2} = 1 - sqrt(1/2),
    // so c = 2 + sqrt(2) and m_b = (1 + sqrt(2))/2.
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), kLn2);
    CHECK(t.c() == doctest::Approx(2 + kSqrt2).epsilon(1e-13));
    CHECK(t.m() == doctest::Approx((1 + kSqrt2) / 2).epsilon(1e-13));
    CHECK_FALSE(t.degenerate);
}

TEST_CASE("tilted geometric is geometric: closed-form c and m at b = log 2") {
    const TiltedLaw t = tilt(InterArrivalLaw::geometric(0.5), kLn2);
    CHECK(t.c() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(t.m() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("shift m = 0 coincides with the basic family") {
    const TiltedLaw a = tilt(InterArrivalLaw::basic(0.5), 0.5);
    const TiltedLaw s = tilt(InterArrivalLaw::shifted(0.5, 0), 0.5);
    CHECK(a.c() == s.c());
    CHECK(a.m() == s.m());
    CHECK(a.law.density(7) == s.law.density(7));
}

TEST_CASE("log-corrected with power 0 reduces to basic") {
    const InterArrivalLaw lc = InterArrivalLaw::logcorrected(0.5, 0);
    CHECK(lc.weight_normalizer() == 1.0);
    const TiltedLaw a = tilt(InterArrivalLaw::basic(0.5), 0.5);
    const TiltedLaw t = tilt(lc, 0.5);
    CHECK(t.c() == doctest::Approx(a.c()).epsilon(1e-12));
    CHECK(lc.tail(17) == doctest::Approx(InterArrivalLaw::basic(0.5).tail(17)).epsilon(1e-12));
}

TEST_CASE("log-corrected tilt: frozen normalizers at alpha = 1/2, j = 2, b = 1/2") {
    const TiltedLaw t = tilt(InterArrivalLaw::logcorrected(0.5, 2), 0.5);
    CHECK(t.c() == doctest::Approx(8.51816298892).epsilon(1e-9));
    CHECK(t.m() == doctest::Approx(1.49558132174).epsilon(1e-9));
}

TEST_CASE("zero tilt needs a finite mean") {
    CHECK_THROWS_AS(tilt(InterArrivalLaw::basic(0.5), 0.0), domain_error);
    CHECK_THROWS_AS(tilt(InterArrivalLaw::basic(0.5), -0.25), domain_error);
    const TiltedLaw t = tilt(InterArrivalLaw::table({0.5, 0.5}), 0.0);
    CHECK(t.c() == 1.0);
    CHECK(t.m() == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("single-point support tilts to the degenerate renewal") {
    const TiltedLaw t = tilt(InterArrivalLaw::table({1.0}), 0.5);
    CHECK(t.law.singleton());
    CHECK(t.degenerate);
    CHECK(t.m() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mu identities: mu(0) = 1/m_b and mu(1) = (1 - K_b(1))/m_b") {
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), 0.5);
    ScopedPrecision scope(t.precision_bits);
    std::vector<Real> mu;
    mu_densities(t, 4, mu);
    const double m = t.m();
    CHECK(static_cast<double>(mu[0]) == doctest::Approx(1.0 / m).epsilon(1e-14));
    std::vector<Real> kb;
    t.densities(1, kb);
    const double expect = (1.0 - static_cast<double>(kb[1])) / m;
    CHECK(static_cast<double>(mu[1]) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(static_cast<double>(mu_density(t, 1)) ==
          doctest::Approx(static_cast<double>(mu[1])).epsilon(1e-15));
}

TEST_CASE("tilted tail table: Kbar(0) = 1 and backward telescoping") {
    const TiltedLaw t = tilt(InterArrivalLaw::basic(0.5), 0.5);
    ScopedPrecision scope(t.precision_bits);
    std::vector<Real> kbar, kb;
    tilted_tail_table(t, 50, kbar);
    t.densities(50, kb);
    CHECK(static_cast<double>(kbar[0]) == doctest::Approx(1.0).epsilon(1e-15));
    for (long n : {0L, 10L, 49L}) {
        const double diff = static_cast<double>(kbar[n] - kbar[n + 1]);
        CHECK(diff == doctest::Approx(static_cast<double>(kb[n + 1])).epsilon(1e-12));
    }
}

TEST_CASE("free energy inverts the tilted normalization") {
    // For alpha = 1/2: sum K(n) e^{-bn} = 1 - sqrt(1 - e^{-b}); choosing
    // beta with e^{-beta} = 1 - sqrt(1/2) makes the answer exactly log 2.
    const double beta = 1.2279471773095156;
    const double b = free_energy(InterArrivalLaw::basic(0.5), beta);
    CHECK(b == doctest::Approx(kLn2).epsilon(1e-10));

    const InterArrivalLaw two = InterArrivalLaw::table({0.5, 0.5});
    const double b2 = free_energy(two, 1.0);
    const double residual = 0.5 * std::exp(-b2) + 0.5 * std::exp(-2 * b2) - std::exp(-1.0);
    CHECK(std::abs(residual) <= 1e-12);

    CHECK_THROWS_AS(free_energy(two, 0.0), domain_error);
    CHECK_THROWS_AS(free_energy(two, -1.0), domain_error);
}

TEST_CASE("json round-trip preserves every family") {
    const std::vector<InterArrivalLaw> laws{
        InterArrivalLaw::basic(0.25),
        InterArrivalLaw::shifted(0.75, 3),
        InterArrivalLaw::logcorrected(0.5, 2),
        InterArrivalLaw::table({0.2, 0.3, 0.5}),
        InterArrivalLaw::table({0.25, 0.375}, 0.5),
        InterArrivalLaw::geometric(0.125),
    };
    for (const InterArrivalLaw& law : laws) {
        const InterArrivalLaw back = InterArrivalLaw::from_json(law.to_json());
        CHECK(back == law);
        CHECK(back.density(5) == law.density(5));
    }
}

TEST_CASE("automatic precision rule") {
    // ceil(1.5 * 0.5 * 2000 / ln 2) + 64 = 2165 + 64
    CHECK(PrecisionSpec{}.resolve(0.5, 2000) == 2229);
    CHECK(PrecisionSpec{}.resolve(0.0, 100000) == 64);
    CHECK(PrecisionSpec::exact(128).resolve(0.5, 2000) == 128);
    CHECK_THROWS_AS(PrecisionSpec::exact(32), domain_error);
}

TEST_CASE("scoped precision controls stored significand bits") {
    // the scope is set through decimal digits, so stored bits meet the
    // request but may exceed it by a few
    ScopedPrecision outer(256);
    const Real x = Real(1) / 3;
    CHECK(bits_of(x) >= 256);
    CHECK(bits_of(x) <= 256 + 32);
    {
        ScopedPrecision inner(128);
        const Real y = Real(1) / 3;
        CHECK(bits_of(y) >= 128);
        CHECK(bits_of(y) <= 128 + 32);
    }
    const Real z = Real(1) / 3;
    CHECK(bits_of(z) == bits_of(x));
    const std::string s = decimal_string(x);
    const Real back = parse_real(s, 256);
    CHECK(back == x);
}
