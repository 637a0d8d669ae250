#include "renew/asympt.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "renew/errors.hpp"

namespace renew {

namespace {

struct FitResult {
    double slope = 0, intercept = 0, r2 = 0;
};

FitResult least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t k = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < k; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < k; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double ssres = syy - f.slope * sxy;
    f.r2 = (syy > 0) ? 1.0 - ssres / syy : 1.0;
    return f;
}

// Single tilted density K_b(n) at the series precision.
Real tilted_density_at(const TiltedLaw& t, long n) {
    ScopedPrecision sp(t.precision_bits);
    std::vector<Real> w;
    t.law.base_weights(n, w);
    return w[n] * exp(Real(-t.b) * n) / t.s_w;
}

} // namespace

RateReport decay_rate(const RenewalSeries& series, long n_lo, long n_hi) {
    const long n_max = series.n_max;
    if (n_lo <= 0)
        n_lo = n_max / 4;
    if (n_hi <= 0)
        n_hi = (3 * n_max) / 4;
    if (n_lo < 1 || n_hi <= n_lo || n_hi > n_max)
        throw domain_error("decay_rate: window must satisfy 1 <= n_lo < n_hi <= n_max");

    std::vector<long> usable;
    bool any_nonzero = false;
    for (long n = n_lo; n <= n_hi; ++n) {
        if (series.sign_d(n) != 0)
            any_nonzero = true;
        if (series.log_abs_d(n) > series.log_floor(n))
            usable.push_back(n);
    }
    if (usable.empty()) {
        if (!any_nonzero)
            throw insufficient_data_error(
                "decay_rate: d(n) vanishes identically on the window "
                "(memoryless law has no transient)");
        throw precision_error("decay_rate: every point in the window sits below the "
                              "rounding floor; raise the working precision");
    }
    if (static_cast<long>(usable.size()) < 20)
        throw insufficient_data_error("decay_rate: fewer than 20 usable points in the window");

    RateReport rep;
    rep.n_lo = n_lo;
    rep.n_hi = n_hi;

    int prev = 0;
    for (long n : usable) {
        const int s = series.sign_d(n);
        if (s != 0) {
            if (prev != 0 && s != prev)
                rep.n_sign_changes += 1;
            prev = s;
        }
    }
    rep.oscillatory = rep.n_sign_changes >= 2;

    std::vector<double> la(usable.size());
    for (size_t i = 0; i < usable.size(); ++i)
        la[i] = series.log_abs_d(usable[i]);

    // |d| dips near each sign crossing; fitting the strict local maxima of
    // |d| (the envelope) removes that bias when enough maxima exist
    std::vector<long> fit_idx;
    if (rep.oscillatory) {
        for (size_t i = 1; i + 1 < usable.size(); ++i)
            if (la[i] > la[i - 1] && la[i] > la[i + 1])
                fit_idx.push_back(static_cast<long>(i));
        if (static_cast<long>(fit_idx.size()) >= 8)
            rep.envelope_used = true;
    }
    std::vector<double> x, y;
    if (rep.envelope_used) {
        for (long i : fit_idx) {
            x.push_back(static_cast<double>(usable[i]));
            y.push_back(la[i]);
        }
    } else {
        for (size_t i = 0; i < usable.size(); ++i) {
            x.push_back(static_cast<double>(usable[i]));
            y.push_back(la[i]);
        }
    }

    const FitResult f = least_squares(x, y);
    rep.rate = -f.slope;
    rep.intercept = f.intercept;
    rep.fit_r2 = f.r2;
    rep.points_used = static_cast<long>(x.size());
    return rep;
}

double sharp_ratio(const RenewalSeries& series, const TiltedLaw& tilted, long n) {
    if (n < 0 || n > series.n_max)
        throw domain_error("sharp_ratio: n outside the computed range");
    const Real kb = tilted_density_at(tilted, n);
    if (kb.sign() == 0)
        throw domain_error("sharp_ratio: K_b(n) = 0 at n = " + std::to_string(n) +
                           " (off the support)");
    ScopedPrecision sp(series.precision_bits);
    const Real cm1 = tilted.c_b - 1;
    return static_cast<double>(series.d[n] * cm1 * cm1 / kb);
}

double grad_ratio(const RenewalSeries& series, const TiltedLaw& tilted, long n) {
    if (n < 0 || n > series.n_max)
        throw domain_error("grad_ratio: n outside the computed range");
    if (!(tilted.b > 0))
        throw domain_error("grad_ratio: the comparison scale needs b > 0");
    if (log_abs(series.grad[n]) <= series.log_floor(n))
        throw precision_error("grad_ratio: grad_u(n) below the rounding floor at n = " +
                              std::to_string(n));
    const Real mu = mu_density(tilted, n);
    if (mu.sign() == 0)
        throw domain_error("grad_ratio: mu_b(n) = 0 beyond the support");
    ScopedPrecision sp(series.precision_bits);
    const Real eb = exp(Real(tilted.b));
    const Real muhat_eb = (tilted.c_b - 1) / (tilted.m_b * (eb - 1));
    const Real predicted = -mu / (muhat_eb * muhat_eb * tilted.m_b);
    return static_cast<double>(series.grad[n] / predicted);
}

double correlation_fn(const RenewalSeries& series, const TiltedLaw& tilted, long n) {
    if (n < 0 || n > series.n_max)
        throw domain_error("correlation_fn: n outside the computed range");
    if (tilted.degenerate)
        throw domain_error("correlation_fn: degenerate law (m_b = 1), u - 1/m_b vanishes");
    ScopedPrecision sp(series.precision_bits);
    const Real scale = tilted.m_b / (tilted.m_b - 1);
    return static_cast<double>(scale * series.d[n]);
}

double correlation_length(const InterArrivalLaw& law, double b, long n_max) {
    const RenewalSeries ds = delta_series(tilt(law, b, {}, n_max), n_max);
    const RateReport rep = decay_rate(ds);
    return 1.0 / rep.rate;
}

long xi_default_n_max(double b) {
    if (!(b > 0))
        throw domain_error("xi_default_n_max: b must be positive");
    const double n = std::ceil(130.0 * std::pow(b, -1.5));
    return std::min<long>(12000, std::max<long>(300, static_cast<long>(n)));
}

std::vector<XiPoint> xi_scan(const InterArrivalLaw& law,
                             const std::vector<double>& b_grid,
                             const std::function<long(double)>& n_max_rule) {
    std::vector<XiPoint> out;
    out.reserve(b_grid.size());
    for (double b : b_grid) {
        const long n_max = n_max_rule ? n_max_rule(b) : xi_default_n_max(b);
        const RenewalSeries ds = delta_series(tilt(law, b, {}, n_max), n_max);
        const RateReport rep = decay_rate(ds);
        XiPoint p;
        p.b = b;
        p.n_max = n_max;
        p.rate = rep.rate;
        p.xi = 1.0 / rep.rate;
        p.b_times_xi = b * p.xi;
        p.fit_r2 = rep.fit_r2;
        p.oscillatory = rep.oscillatory;
        out.push_back(p);
    }
    return out;
}

} // namespace renew
