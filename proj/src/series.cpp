#include "renew/series.hpp"

#include <algorithm>
#include <cmath>

#include <mpfr.h>

namespace renew {

namespace {

// acc += a * b, rounded once
inline void fma_acc(Real& acc, const Real& a, const Real& b) {
    mpfr_fma(acc.backend().data(), a.backend().data(), b.backend().data(),
             acc.backend().data(), MPFR_RNDN);
}

// Re-tilt when the stored precision does not match the request: an explicit
// request is honored exactly (tests compare runs at pinned bit counts), the
// automatic rule only ever upgrades.
TiltedLaw at_precision(const TiltedLaw& t, long n_max, PrecisionSpec prec) {
    if (prec.is_auto()) {
        const int want = prec.resolve(t.b, n_max);
        if (t.precision_bits >= want)
            return t;
        return tilt(t.law, t.b, PrecisionSpec::exact(want), n_max);
    }
    if (t.precision_bits == prec.bits)
        return t;
    return tilt(t.law, t.b, prec, n_max);
}

void check_args(long n_max) {
    if (n_max < 1)
        throw domain_error("renewal series: n_max must be >= 1");
}

} // namespace

double RenewalSeries::log_floor(long n) const {
    const double scale = (n < static_cast<long>(noise_log.size())) ? noise_log[n] : 0.0;
    return std::log(1000.0 * static_cast<double>(n + 2)) -
           precision_bits * M_LN2 + scale;
}

RenewalSeries mass_renewal(const TiltedLaw& tilted, long n_max, PrecisionSpec prec) {
    check_args(n_max);
    const TiltedLaw t = at_precision(tilted, n_max, prec);
    const int pbits = t.precision_bits;
    ScopedPrecision scope(pbits);

    std::vector<Real> kb;
    t.densities(n_max, kb);

    RenewalSeries s{t};
    s.n_max = n_max;
    s.precision_bits = pbits;
    s.u_inf = t.u_inf();
    s.u.resize(n_max + 1);
    s.d.resize(n_max + 1);
    s.grad.resize(n_max + 1);
    s.noise_log.assign(n_max + 1, 0.0); // all addends are O(1) on this route

    s.u[0] = 1;
    Real acc(0);
    for (long n = 1; n <= n_max; ++n) {
        mpfr_set_ui(acc.backend().data(), 0u, MPFR_RNDN);
        for (long j = 0; j < n; ++j) {
            if (kb[n - j].is_zero())
                continue;
            fma_acc(acc, s.u[j], kb[n - j]);
        }
        s.u[n] = acc;
    }
    s.d[0] = s.u[0] - s.u_inf;
    s.grad[0] = 1;
    for (long n = 1; n <= n_max; ++n) {
        s.d[n] = s.u[n] - s.u_inf;
        s.grad[n] = s.u[n] - s.u[n - 1];
    }
    return s;
}

RenewalSeries delta_series(const TiltedLaw& tilted, long n_max, PrecisionSpec prec) {
    check_args(n_max);
    const TiltedLaw t = at_precision(tilted, n_max, prec);
    const int pbits = t.precision_bits;
    ScopedPrecision scope(pbits);

    std::vector<Real> kb, kbar;
    t.densities(n_max, kb);
    tilted_tail_table(t, n_max, kbar);

    RenewalSeries s{t};
    s.n_max = n_max;
    s.precision_bits = pbits;
    s.u_inf = t.u_inf();
    s.u.resize(n_max + 1);
    s.d.resize(n_max + 1);
    s.grad.resize(n_max + 1);
    s.noise_log.assign(n_max + 1, 0.0);

    s.d[0] = 1 - s.u_inf;
    Real acc(0), drive(0);
    for (long n = 1; n <= n_max; ++n) {
        // d(n) = sum_{j<n} d(j) K_b(n-j) - u_inf Kbar_b(n): every addend is
        // at the scale of d(n) itself, so the result stays relatively
        // accurate long after u(n) - u_inf would have cancelled away.
        mpfr_mul(drive.backend().data(), s.u_inf.backend().data(),
                 kbar[n].backend().data(), MPFR_RNDN);
        mpfr_neg(acc.backend().data(), drive.backend().data(), MPFR_RNDN);
        for (long j = 0; j < n; ++j) {
            if (kb[n - j].is_zero())
                continue;
            fma_acc(acc, s.d[j], kb[n - j]);
        }
        s.d[n] = acc;
        s.noise_log[n] = std::max(log_abs(drive), log_abs(acc));
    }
    // The recursion map has the constant sequence as a neutral eigenmode
    // (sum_n K_b(n) = 1), so roundoff injected at scale |d(j)| never decays:
    // it persists as a constant offset. The noise scale at n is therefore
    // the largest addend scale seen so far, not the local one.
    for (long n = 1; n <= n_max; ++n)
        s.noise_log[n] = std::max(s.noise_log[n], s.noise_log[n - 1]);
    s.u[0] = 1;
    s.grad[0] = 1;
    for (long n = 1; n <= n_max; ++n) {
        s.u[n] = s.u_inf + s.d[n];
        s.grad[n] = s.d[n] - s.d[n - 1];
    }

    // Cross-check against the direct recursion on the window where forming
    // u(n) - u_inf has not yet lost its leading bits.
    const long w = std::min(n_max, t.b > 0 ? static_cast<long>(std::ceil(30.0 / t.b)) : 200L);
    std::vector<Real> udir(w + 1);
    udir[0] = 1;
    for (long n = 1; n <= w; ++n) {
        mpfr_set_ui(acc.backend().data(), 0u, MPFR_RNDN);
        for (long j = 0; j < n; ++j) {
            if (kb[n - j].is_zero())
                continue;
            fma_acc(acc, udir[j], kb[n - j]);
        }
        udir[n] = acc;
    }
    const Real unit = ldexp(Real(1), -(pbits - 6));
    for (long n = 0; n <= w; ++n) {
        const Real diff = abs((udir[n] - s.u_inf) - s.d[n]);
        if (diff > abs(s.d[n]) / 100 + unit * Real(n + 2))
            throw precision_error(
                "delta series: direct and subtracted recursions disagree at n = " +
                std::to_string(n));
    }
    return s;
}

} // namespace renew
