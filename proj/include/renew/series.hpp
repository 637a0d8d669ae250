#pragma once

#include <utility>
#include <vector>

#include "renew/laws.hpp"
#include "renew/precision.hpp"

namespace renew {

// Mass renewal function u(n) = P(n is visited) of the tilted renewal and
// its centered form d(n) = u(n) - 1/m_b, n = 0..n_max, at extended
// precision. grad(n) = u(n) - u(n-1) with u(-1) := 0.
struct RenewalSeries {
    explicit RenewalSeries(TiltedLaw t) : tilted(std::move(t)) {}

    TiltedLaw tilted;
    long n_max = 0;
    int precision_bits = 64;
    Real u_inf;
    std::vector<Real> u, d, grad;

    // log of the largest addend magnitude the recursion has handled up to
    // step n (the constant sequence is a neutral mode of the convolution
    // map, so early roundoff persists); rounding noise in d(n) lives at
    // 2^-P times this scale.
    std::vector<double> noise_log;

    double u_at(long n) const { return static_cast<double>(u[n]); }
    double d_at(long n) const { return static_cast<double>(d[n]); }
    double grad_at(long n) const { return static_cast<double>(grad[n]); }
    double log_abs_d(long n) const { return log_abs(d[n]); }
    int sign_d(long n) const { return d[n].sign(); }

    // log of the absolute rounding floor at index n: values of |d| below it
    // are indistinguishable from accumulated roundoff.
    double log_floor(long n) const;
};

// Direct route: u(n) = 1_{n=0} + sum_{j<n} u(j) K_b(n-j); d = u - u_inf.
RenewalSeries mass_renewal(const TiltedLaw& tilted, long n_max, PrecisionSpec prec = {});

// Subtracted route: d(n) = sum_{j<n} d(j) K_b(n-j) - u_inf Kbar_b(n), which
// keeps every addend at the scale of d(n) itself (no O(1) cancellation), so
// d stays relatively accurate even when |d| << 2^-P. Cross-checked against
// the direct route on a leading window; u = u_inf + d.
RenewalSeries delta_series(const TiltedLaw& tilted, long n_max, PrecisionSpec prec = {});

} // namespace renew
