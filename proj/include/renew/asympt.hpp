#pragma once

#include <functional>
#include <vector>

#include "renew/series.hpp"

namespace renew {

// Least-squares estimate of the exponential decay rate of |d(n)|.
struct RateReport {
    double rate = 0;      // -slope of log|d(n)| vs n
    double intercept = 0;
    long n_lo = 0, n_hi = 0;
    double fit_r2 = 0;
    bool oscillatory = false;  // sign changes detected in the window
    long n_sign_changes = 0;
    bool envelope_used = false;
    long points_used = 0;
};

// Fits log|d(n)| over [n_lo, n_hi] (defaults: [n_max/4, 3 n_max/4]). Only
// points with |d(n)| above the rounding floor enter the fit. When the sign
// oscillates, |d| dips near each crossing, which biases a plain fit; the
// fit is then restricted to the strict local maxima of |d| (the envelope),
// provided at least 8 such points exist. Alternating-sign sequences with
// monotone |d| have no interior maxima and fall back to the plain fit,
// which is unbiased for them. Throws insufficient_data_error below 20
// usable points, precision_error if the whole window sits under the floor.
RateReport decay_rate(const RenewalSeries& series, long n_lo = 0, long n_hi = 0);

// d(n) (c(b)-1)^2 / K_b(n): tends to 1 when the decay of d is driven by
// the tilted density's own tail (no annulus zero, b below b0). Throws
// domain_error where K_b(n) = 0 (off-support n of shifted laws).
double sharp_ratio(const RenewalSeries& series, const TiltedLaw& tilted, long n);

// grad_u(n) / [ -mu_b(n) / (muhat_b(e^b)^2 m_b) ] with
// muhat_b(e^b) = (c(b)-1)/(m_b (e^b - 1)); tends to 1 in the same regime
// as sharp_ratio. Throws precision_error when |grad_u(n)| is below the
// rounding floor.
double grad_ratio(const RenewalSeries& series, const TiltedLaw& tilted, long n);

// Correlation function c(n) = (m_b/(m_b-1)) (u(n) - 1/m_b); c(0) = 1.
// Throws domain_error for degenerate laws (m_b <= 1 + 1e-12).
double correlation_fn(const RenewalSeries& series, const TiltedLaw& tilted, long n);

// xi(b) = 1 / decay_rate of d(n) over the default window.
double correlation_length(const InterArrivalLaw& law, double b, long n_max);

struct XiPoint {
    double b = 0;
    long n_max = 0;
    double xi = 0;
    double b_times_xi = 0;
    double rate = 0;
    double fit_r2 = 0;
    bool oscillatory = false;
};

// Horizon rule used by xi_scan when none is supplied: the relative fit
// bias falls like 1/(b n_max), so n_max grows as b^{-3/2} to leave a
// deviation of b xi from 1 that shrinks with b.
long xi_default_n_max(double b);

// Correlation length over a grid of tilts. Empty grid gives empty table.
std::vector<XiPoint> xi_scan(const InterArrivalLaw& law,
                             const std::vector<double>& b_grid,
                             const std::function<long(double)>& n_max_rule = {});

} // namespace renew
