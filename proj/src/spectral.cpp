#include "renew/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <utility>
#include <vector>

#include "renew/errors.hpp"
#include "renew/series.hpp"

namespace renew {

namespace {

constexpr double kPi = 3.14159265358979323846;

Complex ipow(Complex z, long m) {
    Complex p = 1.0;
    while (m-- > 0)
        p *= z;
    return p;
}

// Local evaluation error of 1 - Khat_b at a double-precision point.
double eval_error(Complex khat_value) {
    return 1e-12 * (1.0 + std::abs(khat_value));
}

// Closed form for basic/shifted: Khat_b(z) = z^m (1 - w^alpha) / (1 - q1),
// w = 1 - z e^{-b}, q1 = (1 - e^{-b})^alpha, principal branch. The cut
// {w real < 0} is exactly {z real > e^b}.
struct PowerClosedForm {
    double alpha, emb, q1;
    long m;

    explicit PowerClosedForm(const TiltedLaw& t)
        : alpha(t.law.alpha()), emb(std::exp(-t.b)),
          q1(std::pow(1.0 - std::exp(-t.b), t.law.alpha())),
          m(t.law.family() == Family::shifted ? t.law.shift() : 0) {}

    void cut_check(Complex z, double b) const {
        if (z.imag() == 0.0 && z.real() > std::exp(b))
            throw singular_error("khat: real z beyond e^b lies on the branch cut");
    }

    Complex value(Complex z) const {
        const Complex w = 1.0 - z * emb;
        return ipow(z, m) * (1.0 - std::pow(w, alpha)) / (1.0 - q1);
    }

    Complex derivative(Complex z) const {
        const Complex w = 1.0 - z * emb;
        Complex d = ipow(z, m) * alpha * emb * std::pow(w, alpha - 1.0);
        if (m > 0)
            d += static_cast<double>(m) * ipow(z, m - 1) * (1.0 - std::pow(w, alpha));
        return d / (1.0 - q1);
    }
};

// Exact rational form for table laws: finite head polynomial plus the
// geometric-tail term c K(H) zeta^H r zeta / (1 - r zeta), zeta = z e^{-b}.
// Converges (and continues analytically) wherever |r zeta| < 1.
struct TableClosedForm {
    const std::vector<double>& h;
    double c, emb, r;
    long H;

    explicit TableClosedForm(const TiltedLaw& t)
        : h(t.law.head()), c(t.c()), emb(std::exp(-t.b)), r(t.law.tail_ratio()),
          H(static_cast<long>(t.law.head().size())) {}

    void domain_check(Complex z) const {
        if (r > 0 && std::abs(r * z * emb) >= 1.0 - 1e-12)
            throw domain_error("khat: table series diverges, need |z| < e^b / tail_ratio");
    }

    Complex value(Complex z) const {
        const Complex zeta = z * emb;
        Complex p = 1.0, s = 0.0;
        for (long n = 1; n <= H; ++n) {
            p *= zeta;
            s += h[n - 1] * p;
        }
        if (r > 0)
            s += h[H - 1] * p * (r * zeta) / (1.0 - r * zeta); // p = zeta^H
        return c * s;
    }

    // sum_n n K_b(n) z^{n-1}
    Complex derivative(Complex z) const {
        if (std::abs(z) < 1e-300)
            return c * h[0] * emb;
        const Complex zeta = z * emb;
        Complex p = 1.0, s1 = 0.0;
        for (long n = 1; n <= H; ++n) {
            p *= zeta;
            s1 += static_cast<double>(n) * h[n - 1] * p;
        }
        if (r > 0) {
            // sum_{n>H} n x^n = x^{H+1} ((H+1) - H x) / (1-x)^2 with x = r zeta,
            // and K(H) r^{n-H} z^n e^{-bn} = K(H) r^{-H} x^n; note p x = r^{-H} x^{H+1}
            const Complex x = r * zeta;
            const Complex hx = static_cast<double>(H + 1) - static_cast<double>(H) * x;
            s1 += h[H - 1] * p * x * hx / ((1.0 - x) * (1.0 - x));
        }
        return c * s1 / z;
    }
};

// Ratio K(n+1)/K(n) along the support of a power-tail family.
double density_ratio(const InterArrivalLaw& law, long k) {
    // k indexes the unshifted law: K_basic(k+1)/K_basic(k) = (k - alpha)/(k + 1)
    double rat = (static_cast<double>(k) - law.alpha()) / static_cast<double>(k + 1);
    if (law.family() == Family::logcorrected) {
        const double g = std::log(static_cast<double>(k + 1) + M_E) /
                         std::log(static_cast<double>(k) + M_E);
        for (int i = 0; i < law.logpow(); ++i)
            rat *= g;
    }
    return rat;
}

// Truncated series sum_n f(n) K_b(n) z^n with f(n) = 1 (order 0) or n
// (order 1), by stable term-ratio recursion. Power families only; the
// table case is handled in closed form by the callers.
Complex power_family_series(const TiltedLaw& t, Complex z, double tol, int order) {
    const InterArrivalLaw& law = t.law;
    const Complex zeta = z * std::exp(-t.b);
    const double az = std::abs(zeta);
    if (az >= 1.0 - 1e-12)
        throw domain_error("khat: series truncation needs |z| < e^b for this family");
    if (az == 0.0)
        return 0.0;

    const long m = (law.family() == Family::shifted) ? law.shift() : 0;
    const long n0 = m + 1;
    // term = c K(n) zeta^n; all ratios are <= 1 once n - m >= 64, which the
    // tail bound below relies on.
    Complex term = t.c() * law.density(n0) * ipow(zeta, n0);
    Complex sum = 0.0;
    const long cap = 30000000;
    for (long n = n0; n <= n0 + cap; ++n) {
        sum += (order == 0) ? term : static_cast<double>(n) * term;
        // tail bound: remaining ratios are <= 1, so sum_{k>=1} (n+k) az^k <=
        // az/(1-az) * (n + 1/(1-az))
        const double weight =
            (order == 0) ? 1.0 : static_cast<double>(n) + 1.0 + 1.0 / (1.0 - az);
        if (n - m >= 64 && std::abs(term) * weight * az / (1.0 - az) <= tol)
            return sum;
        term *= density_ratio(law, n - m) * zeta;
    }
    throw precision_error("khat: series needs too many terms at this |z|; "
                          "move the evaluation point off the convergence rim");
}

// sum_{n=0}^{N} v[n] z^n with log-scaled magnitudes, immune to the
// over/underflow of v[n] and z^n separately.
Complex scaled_power_sum(const std::vector<Real>& v, long N, Complex z) {
    const double az = std::abs(z);
    if (az == 0.0)
        return static_cast<double>(v[0]);
    const double lz = std::log(az);
    const double th = std::arg(z);
    Complex s = 0.0;
    for (long n = 0; n <= N && n < static_cast<long>(v.size()); ++n) {
        const double la = log_abs(v[n]);
        if (!(la > -std::numeric_limits<double>::infinity()))
            continue;
        const double lm = la + static_cast<double>(n) * lz;
        if (lm < -745.0)
            continue;
        const double mag = (v[n].sign() < 0 ? -1.0 : 1.0) * std::exp(lm);
        const double ph = static_cast<double>(n) * th;
        s += mag * Complex(std::cos(ph), std::sin(ph));
    }
    return s;
}

struct WindingResult {
    long winding = 0;
    double min_abs_f = 0;
    double max_err = 0;
    long samples = 0;
};

// Unwrapped argument of 1 - Khat_b around |z| = r, by adaptive arc
// subdivision: a segment is split until the argument step is below pi/2.
WindingResult winding_number(const TiltedLaw& t, double r, long& budget) {
    const auto f = [&](double theta) {
        const Complex z = r * Complex(std::cos(theta), std::sin(theta));
        const Complex k = khat(t, z);
        return std::pair<Complex, double>(1.0 - k, eval_error(k));
    };

    WindingResult res;
    res.min_abs_f = std::numeric_limits<double>::infinity();

    const long M = 512;
    std::vector<Complex> base(M + 1);
    for (long i = 0; i < M; ++i) {
        if (--budget < 0)
            throw singular_error("count_zeros: contour sample budget exhausted");
        auto [fv, err] = f(2.0 * kPi * static_cast<double>(i) / static_cast<double>(M));
        base[i] = fv;
        res.min_abs_f = std::min(res.min_abs_f, std::abs(fv));
        res.max_err = std::max(res.max_err, err);
        res.samples += 1;
    }
    base[M] = base[0];

    double total = 0.0;
    // explicit stack of unresolved arcs (theta_a, f_a, theta_b, f_b)
    struct Arc {
        double ta, tb;
        Complex fa, fb;
    };
    std::vector<Arc> stack;
    for (long i = 0; i < M; ++i)
        stack.push_back({2.0 * kPi * static_cast<double>(i) / static_cast<double>(M),
                         2.0 * kPi * static_cast<double>(i + 1) / static_cast<double>(M),
                         base[i], base[i + 1]});
    while (!stack.empty()) {
        Arc a = stack.back();
        stack.pop_back();
        const double step = std::arg(a.fb / a.fa);
        if (std::abs(step) < 0.5 * kPi) {
            total += step;
            continue;
        }
        if (a.tb - a.ta < 1e-12)
            throw singular_error("count_zeros: argument step will not resolve; "
                                 "a zero sits (numerically) on the contour");
        if (--budget < 0)
            throw singular_error("count_zeros: contour sample budget exhausted");
        const double tm = 0.5 * (a.ta + a.tb);
        auto [fm, err] = f(tm);
        res.min_abs_f = std::min(res.min_abs_f, std::abs(fm));
        res.max_err = std::max(res.max_err, err);
        res.samples += 1;
        stack.push_back({a.ta, tm, a.fa, fm});
        stack.push_back({tm, a.tb, fm, a.fb});
    }

    if (res.min_abs_f <= 10.0 * res.max_err)
        throw singular_error("count_zeros: contour passes too close to a zero of 1 - Khat_b");

    const double w = total / (2.0 * kPi);
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.25)
        throw singular_error("count_zeros: winding sum failed to close to an integer");
    res.winding = static_cast<long>(rounded);
    return res;
}

RootReport make_report(const TiltedLaw& t, Complex z) {
    RootReport r;
    r.z0 = z;
    r.modulus = std::abs(z);
    r.khat_derivative = khat_derivative(t, z);
    r.pole_coefficient = 1.0 / (z * r.khat_derivative);
    r.residual = std::abs(1.0 - khat(t, z));
    return r;
}

// Newton refinement of 1 - Khat_b from one seed; empty optional on failure.
bool newton_refine(const TiltedLaw& t, Complex& z) {
    for (int it = 0; it < 80; ++it) {
        Complex fv, fp;
        try {
            fv = 1.0 - khat(t, z);
            fp = -khat_derivative(t, z);
        } catch (const std::exception&) {
            return false; // wandered onto the cut or out of the domain
        }
        if (!(std::abs(fp) > 1e-300))
            return false;
        const Complex step = fv / fp;
        z -= step;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z)))
            return true;
    }
    return false;
}

std::vector<RootReport> collect_roots(const TiltedLaw& t, double r_in, double r_out,
                                      int grid_radial, int grid_angular) {
    std::vector<Complex> found;
    const auto push_unique = [&](Complex z) {
        for (const Complex& w : found)
            if (std::abs(w - z) < 1e-8)
                return;
        found.push_back(z);
    };

    for (int i = 0; i < grid_radial; ++i) {
        const double r =
            r_in + (r_out - r_in) * (static_cast<double>(i) + 0.5) / grid_radial;
        for (int j = 0; j < grid_angular; ++j) {
            const double th = 2.0 * kPi * (static_cast<double>(j) + 0.5) / grid_angular;
            Complex z = r * Complex(std::cos(th), std::sin(th));
            if (!newton_refine(t, z))
                continue;
            // snap near-real roots onto the axis and re-polish there
            if (std::abs(z.imag()) <= 1e-10 * std::abs(z)) {
                z = Complex(z.real(), 0.0);
                newton_refine(t, z);
                z = Complex(z.real(), 0.0);
            }
            const double az = std::abs(z);
            if (!(az > r_in) || !(az < r_out))
                continue;
            bool ok = true;
            try {
                ok = std::abs(1.0 - khat(t, z)) <= 1e-10;
            } catch (const std::exception&) {
                ok = false;
            }
            if (ok)
                push_unique(z);
        }
    }

    // nonreal roots of a real-coefficient series come in conjugate pairs;
    // add any mate the grid missed
    const size_t base = found.size();
    for (size_t i = 0; i < base; ++i) {
        if (std::abs(found[i].imag()) <= 1e-12)
            continue;
        const Complex mate = std::conj(found[i]);
        bool present = false;
        for (const Complex& w : found)
            if (std::abs(w - mate) < 1e-8)
                present = true;
        if (!present)
            found.push_back(mate);
    }

    std::vector<RootReport> out;
    out.reserve(found.size());
    for (const Complex& z : found)
        out.push_back(make_report(t, z));
    std::sort(out.begin(), out.end(), [](const RootReport& a, const RootReport& b) {
        if (a.modulus != b.modulus)
            return a.modulus < b.modulus;
        return std::arg(a.z0) < std::arg(b.z0);
    });
    return out;
}

} // namespace

Complex khat(const TiltedLaw& t, Complex z, double tol) {
    switch (t.law.family()) {
    case Family::basic:
    case Family::shifted: {
        PowerClosedForm cf(t);
        cf.cut_check(z, t.b);
        return cf.value(z);
    }
    case Family::table: {
        TableClosedForm cf(t);
        cf.domain_check(z);
        return cf.value(z);
    }
    case Family::logcorrected:
        return power_family_series(t, z, tol, 0);
    }
    throw domain_error("khat: unknown family");
}

Complex khat_derivative(const TiltedLaw& t, Complex z, double tol) {
    switch (t.law.family()) {
    case Family::basic:
    case Family::shifted: {
        PowerClosedForm cf(t);
        cf.cut_check(z, t.b);
        return cf.derivative(z);
    }
    case Family::table: {
        TableClosedForm cf(t);
        cf.domain_check(z);
        return cf.derivative(z);
    }
    case Family::logcorrected: {
        if (std::abs(z) < 1e-300)
            return t.c() * t.law.density(1) * std::exp(-t.b);
        return power_family_series(t, z, tol, 1) / z;
    }
    }
    throw domain_error("khat_derivative: unknown family");
}

Complex khat_series(const TiltedLaw& t, Complex z, double tol) {
    if (t.law.family() != Family::table)
        return power_family_series(t, z, tol, 0);

    // table: exact head, then geometric term recursion past it
    const std::vector<double>& h = t.law.head();
    const long H = static_cast<long>(h.size());
    const double r = t.law.tail_ratio();
    const Complex zeta = z * std::exp(-t.b);
    Complex p = 1.0, sum = 0.0;
    for (long n = 1; n <= H; ++n) {
        p *= zeta;
        sum += t.c() * h[n - 1] * p;
    }
    if (r > 0) {
        const double g = r * std::abs(zeta);
        if (g >= 1.0 - 1e-12)
            throw domain_error("khat: table series diverges, need |z| < e^b / tail_ratio");
        Complex term = t.c() * h[H - 1] * p; // c K(H) zeta^H
        while (std::abs(term) * g / (1.0 - g) > tol) {
            term *= r * zeta;
            sum += term;
        }
    }
    return sum;
}

Complex delta_transform(const TiltedLaw& t, Complex z) {
    if (std::abs(z) >= std::exp(t.b) * (1.0 - 1e-12))
        throw domain_error("delta_transform: needs |z| < e^b");

    if (std::abs(z - 1.0) < 0.05) {
        // both poles of the closed form are within O(0.05) here; the partial
        // sum of the (rapidly decaying) delta coefficients is well posed
        const long N = (t.b > 0)
                           ? std::min<long>(static_cast<long>(std::ceil(42.0 / t.b)) + 50, 20000)
                           : 600;
        RenewalSeries ds = delta_series(t, N);
        return scaled_power_sum(ds.d, N, z);
    }

    const Complex k = khat(t, z);
    const Complex den = 1.0 - k;
    if (std::abs(den) <= 1e-11 * (1.0 + std::abs(k)))
        throw singular_error("delta_transform: z is numerically a zero of 1 - Khat_b");
    return 1.0 / den - static_cast<double>(t.u_inf()) / (1.0 - z);
}

MuhatResult muhat_and_grubel_check(const TiltedLaw& t, Complex z, long n_terms) {
    if (std::abs(z) <= 1e-14)
        throw singular_error("muhat: z = 0 excluded");
    if (std::abs(z - 1.0) <= 1e-14)
        throw singular_error("muhat: z = 1 excluded");
    if (std::abs(z) > std::exp(t.b) * (1.0 + 1e-12))
        throw domain_error("muhat: needs |z| <= e^b");
    if (n_terms < 8)
        throw domain_error("muhat: n_terms too small");

    MuhatResult res;
    res.n_terms = n_terms;
    res.by_closed_form = (1.0 - khat(t, z)) / (t.m() * (1.0 - z));

    std::vector<Real> mu;
    mu_densities(t, n_terms, mu);
    res.by_series = scaled_power_sum(mu, n_terms, z);

    RenewalSeries ds = delta_series(t, n_terms);
    const Complex grad_uhat = scaled_power_sum(ds.grad, n_terms, z);
    res.grubel_residual = std::abs(grad_uhat - 1.0 / (t.m() * res.by_closed_form));
    return res;
}

AnnulusCount count_zeros(const TiltedLaw& t, double r_in, double r_out,
                         long sample_budget) {
    if (!(r_in > 1.0) || !(r_out > r_in))
        throw domain_error("count_zeros: need 1 < r_in < r_out");
    if (r_out > std::exp(t.b) * (1.0 + 1e-12))
        throw domain_error("count_zeros: r_out must stay within |z| <= e^b");

    long budget = sample_budget;
    const WindingResult wo = winding_number(t, r_out, budget);
    const WindingResult wi = winding_number(t, r_in, budget);

    AnnulusCount c;
    c.r_in = r_in;
    c.r_out = r_out;
    c.count = wo.winding - wi.winding;
    c.winding_samples = wo.samples + wi.samples;
    if (c.count < 0)
        throw singular_error("count_zeros: negative annulus count, winding corrupted "
                             "by a near-contour zero");
    return c;
}

std::vector<RootReport> find_roots(const TiltedLaw& t, double r_out, double r_in,
                                   int grid_radial, int grid_angular,
                                   long sample_budget) {
    if (r_out <= 0)
        r_out = std::exp(t.b) * (1.0 - 1e-6);
    if (r_in <= 0)
        r_in = 1.0 + 1e-4 * t.b;
    if (grid_radial < 2 || grid_angular < 4)
        throw domain_error("find_roots: refinement grid too small");

    const AnnulusCount cnt = count_zeros(t, r_in, r_out, sample_budget);
    if (cnt.count == 0)
        return {};

    std::vector<RootReport> roots = collect_roots(t, r_in, r_out, grid_radial, grid_angular);
    if (static_cast<long>(roots.size()) != cnt.count)
        roots = collect_roots(t, r_in, r_out, 2 * grid_radial, 2 * grid_angular);
    if (static_cast<long>(roots.size()) != cnt.count)
        throw count_mismatch_error(
            "find_roots: refined " + std::to_string(roots.size()) +
            " roots but the contour count is " + std::to_string(cnt.count) +
            " (multiple roots, or basins the grid missed)");
    return roots;
}

double critical_tilt(const InterArrivalLaw& law, double b_lo, double b_hi, double tol) {
    if (!(b_lo > 0) || !(b_hi > b_lo))
        throw domain_error("critical_tilt: need 0 < b_lo < b_hi");
    if (!(tol >= 1e-12))
        throw domain_error("critical_tilt: tol below 1e-12 is not resolvable");

    const auto predicate = [&](double b) {
        const TiltedLaw t = tilt(law, b);
        const double r_in = 1.0 + 1e-4 * b;
        const double eb = std::exp(b);
        const double eps_out = std::min(1e-4 * b, std::max(tol / 4.0, 1e-9) * eb);
        const double r_out = eb - eps_out;
        if (!(r_out > r_in))
            throw domain_error("critical_tilt: annulus collapses, b too small");
        return count_zeros(t, r_in, r_out).count >= 1;
    };
    // a root grazing a contour makes the winding fail; retry at slightly
    // shifted tilts before giving up
    const auto robust = [&](double b, double width) {
        const double shifts[] = {0.0, width / 16, -width / 16, width / 8, -width / 8};
        for (size_t i = 0; i + 1 < std::size(shifts); ++i) {
            try {
                return predicate(b + shifts[i]);
            } catch (const singular_error&) {
                continue;
            }
        }
        return predicate(b + shifts[std::size(shifts) - 1]);
    };

    const double w0 = (b_hi - b_lo) / 64;
    if (robust(b_lo, w0))
        throw domain_error("critical_tilt: a zero already exists at b_lo; widen the bracket down");
    if (!robust(b_hi, -w0))
        return std::numeric_limits<double>::infinity();

    double lo = b_lo, hi = b_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (robust(mid, (hi - lo) / 4))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double pole_asymptote(const std::vector<RootReport>& roots, long n) {
    if (n < 0)
        throw domain_error("pole_asymptote: n must be >= 0");
    if (roots.empty())
        return 0.0;

    double min_mod = std::numeric_limits<double>::infinity();
    for (const RootReport& r : roots)
        min_mod = std::min(min_mod, r.modulus);

    Complex sum = 0.0;
    for (const RootReport& r : roots) {
        if (r.modulus > min_mod * (1.0 + 1e-9))
            continue;
        if (!(std::abs(r.khat_derivative) > 1e-8))
            throw singular_error("pole_asymptote: zero fails the simplicity threshold, "
                                 "the simple-pole expansion does not apply");
        sum += r.pole_coefficient * std::pow(r.z0, static_cast<double>(-n));
    }
    return sum.real();
}

} // namespace renew
