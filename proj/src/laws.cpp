#include "renew/laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <mpfr.h>

namespace renew {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// -Gamma(-alpha) = Gamma(1-alpha)/alpha > 0 for alpha in (0,1).
double neg_gamma_neg_alpha(double alpha) {
    return std::tgamma(1.0 - alpha) / alpha;
}

// K(n) = Gamma(n-alpha)/(-Gamma(-alpha) n!) via the ratio recursion
// K(1) = alpha, K(n+1) = K(n) (n-alpha)/(n+1).
double basic_density_d(double alpha, long n) {
    if (n < 1)
        return 0.0;
    double k = alpha;
    for (long i = 1; i < n; ++i)
        k *= (static_cast<double>(i) - alpha) / static_cast<double>(i + 1);
    return k;
}

// Kbar(n) via Kbar(0) = 1, Kbar(N) = Kbar(N-1) (N-alpha)/N.
double basic_tail_d(double alpha, long n) {
    if (n <= 0)
        return 1.0;
    double t = 1.0;
    for (long i = 1; i <= n; ++i)
        t *= (static_cast<double>(i) - alpha) / static_cast<double>(i);
    return t;
}

// ---- logcorrected family: weights w(n) = K(n) (log(n+e))^j. The weight
// sum converges like N^{-alpha} log^j N, far too slowly to exhaust by
// summation, so the normalizer splits into an exact head and a tail
// handled by midpoint Euler-Maclaurin: sum_{n>N} g(n) =
// int_{N+1/2}^inf g + g'(N+1/2)/24 + O(g'''), with g the continuation of
// the weight to real x through the gamma-function form of K.

// log(Gamma(x-alpha)/Gamma(x+1)). The naive lgamma difference cancels
// catastrophically for large x (two O(x log x) values differing by
// O(log x)); past x = 512 use the Stirling expansion of the difference,
// whose terms are all O(log x) or smaller.
double lc_log_gamma_ratio(double alpha, double x) {
    if (x < 512.0)
        return std::lgamma(x - alpha) - std::lgamma(x + 1.0);
    const auto stirling_tail = [](double z) {
        const double z2 = z * z;
        return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * z2)) / z2) / z;
    };
    return -(1.0 + alpha) * std::log(x) + (x - alpha - 0.5) * std::log1p(-alpha / x) -
           (x + 0.5) * std::log1p(1.0 / x) + (1.0 + alpha) + stirling_tail(x - alpha) -
           stirling_tail(x + 1.0);
}

double lc_g(double alpha, int j, double log_nga, double x) {
    const double lg = lc_log_gamma_ratio(alpha, x);
    return std::exp(lg - log_nga) * std::pow(std::log(x + M_E), j);
}

double lc_g_prime(double alpha, int j, double log_nga, double x) {
    const double g = lc_g(alpha, j, log_nga, x);
    double logderiv = boost::math::digamma(x - alpha) - boost::math::digamma(x + 1.0);
    if (j > 0)
        logderiv += static_cast<double>(j) / ((x + M_E) * std::log(x + M_E));
    return g * logderiv;
}

// sum_{n>N} w(n), unnormalized. Requires N >= 64 or so for the O(g''')
// remainder to sit below double accuracy. The substitution x = a e^s turns
// the power-decay integrand into an exponentially decaying one, which is
// the regime exp_sinh quadrature is built for.
double lc_tail_raw(double alpha, int j, long N) {
    const double log_nga = std::log(neg_gamma_neg_alpha(alpha));
    const double a = static_cast<double>(N) + 0.5;
    boost::math::quadrature::exp_sinh<double> integrator;
    const auto f = [&](double s) {
        const double x = a * std::exp(s);
        if (!(x < 1e290)) // remaining mass ~ x^-alpha, below double noise
            return 0.0;
        // g(x) * x with the exponents combined, so the x^{-alpha} scale
        // survives long after g alone would have underflowed
        const double lg = lc_log_gamma_ratio(alpha, x) - log_nga + std::log(x);
        return std::exp(lg) * std::pow(std::log(x + M_E), j);
    };
    double err = 0;
    const double integral = integrator.integrate(f, 0.0, kInf, 1e-13, &err);
    return integral + lc_g_prime(alpha, j, log_nga, a) / 24.0;
}

constexpr long kLcHead = 1024; // exact-summation head length for the above

double lc_norm(double alpha, int j) {
    if (j == 0)
        return 1.0; // uncorrected weights carry unit mass in closed form
    double sum = 0, comp = 0; // Kahan
    double k = alpha;
    for (long n = 1; n <= kLcHead; ++n) {
        const double term = k * std::pow(std::log(static_cast<double>(n) + M_E), j);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        k *= (static_cast<double>(n) - alpha) / static_cast<double>(n + 1);
    }
    return sum + lc_tail_raw(alpha, j, kLcHead);
}

std::string dec17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double json_number(const nlohmann::json& v) {
    if (v.is_string())
        return std::stod(v.get<std::string>());
    return v.get<double>();
}

// Raw tilted sums S0 = sum_n w(n) e^{-bn} and S1 = sum_n n w(n) e^{-bn}
// at the ambient Real precision, truncated when the geometric tail bound
// falls below 2^-(P+16) of the running sums. b > 0 required for infinite
// support.
void weighted_tilt_sums(const InterArrivalLaw& law, double b, int pbits, Real& s0, Real& s1) {
    ScopedPrecision scope(pbits);
    const Real eb = exp(-Real(b));
    const Real E = exp(Real(1));
    s0 = 0;
    s1 = 0;
    if (law.family() == Family::table) {
        // finite head + geometric continuation: closed form, exact at P
        const auto& h = law.head();
        const long H = static_cast<long>(h.size());
        Real pw = 1;
        for (long i = 0; i < H; ++i) {
            pw *= eb;
            s0 += Real(h[i]) * pw;
            s1 += Real(i + 1) * Real(h[i]) * pw;
        }
        if (law.tail_ratio() > 0) {
            const Real rho = Real(law.tail_ratio()) * eb;
            if (rho >= 1)
                throw domain_error("tilt: geometric tail does not converge at this b");
            const Real kh = Real(h[H - 1]) * pw; // w(H) e^{-bH}
            s0 += kh * rho / (1 - rho);
            s1 += kh * (Real(H) * rho / (1 - rho) + rho / ((1 - rho) * (1 - rho)));
        }
        return;
    }
    if (b <= 0)
        throw domain_error("tilt: b = 0 needs a finite-mean law");
    const double alpha = law.alpha();
    const long m = (law.family() == Family::shifted) ? law.shift() : 0;
    const int j = (law.family() == Family::logcorrected) ? law.logpow() : 0;
    const Real threshold_scale = ldexp(Real(1), -(pbits + 16));
    Real w = alpha; // basic weight at k = 1
    Real pw = exp(-Real(b) * Real(m + 1));
    const long cap = 100000000;
    for (long k = 1;; ++k) {
        const long n = k + m;
        Real term = w * pw;
        if (j > 0) {
            Real lf = log(Real(n) + E);
            Real lfj = lf;
            for (int i = 1; i < j; ++i)
                lfj *= lf;
            term *= lfj;
        }
        s0 += term;
        s1 += Real(n) * term;
        // tail bound: basic weights decrease; the log factor grows by at
        // most exp(j/((n+e)log(n+e))) per step
        double growth = 1.0;
        if (j > 0)
            growth = std::exp(j / ((static_cast<double>(n) + M_E) * std::log(static_cast<double>(n) + M_E)));
        const double g = std::exp(-b) * growth;
        if (g < 1) {
            const Real bound = term * Real(g / (1 - g));
            if (bound * Real(n + 2) < threshold_scale * s0 && k > 8)
                break;
        }
        if (k >= cap)
            throw precision_error("tilt: series for c(b) did not converge within budget");
        w *= (Real(k) - Real(alpha)) / Real(k + 1);
        pw *= eb;
        if (k % 512 == 0)
            pw = exp(-Real(b) * Real(n + 1)); // cancel multiplicative drift
    }
}

} // namespace

// ---------------------------------------------------------------- laws

InterArrivalLaw InterArrivalLaw::basic(double alpha) {
    if (!(alpha > 0) || !(alpha < 1))
        throw domain_error("basic law: alpha must lie in (0,1)");
    InterArrivalLaw law;
    law.family_ = Family::basic;
    law.alpha_ = alpha;
    return law;
}

InterArrivalLaw InterArrivalLaw::shifted(double alpha, int m) {
    if (!(alpha > 0) || !(alpha < 1))
        throw domain_error("shifted law: alpha must lie in (0,1)");
    if (m < 0)
        throw domain_error("shifted law: shift must be >= 0");
    InterArrivalLaw law;
    law.family_ = Family::shifted;
    law.alpha_ = alpha;
    law.shift_ = m;
    return law;
}

InterArrivalLaw InterArrivalLaw::logcorrected(double alpha, int logpow) {
    if (!(alpha > 0) || !(alpha < 1))
        throw domain_error("logcorrected law: alpha must lie in (0,1)");
    if (logpow < 0)
        throw domain_error("logcorrected law: log power must be >= 0");
    InterArrivalLaw law;
    law.family_ = Family::logcorrected;
    law.alpha_ = alpha;
    law.logpow_ = logpow;
    law.normalizer_ = lc_norm(alpha, logpow);
    return law;
}

InterArrivalLaw InterArrivalLaw::table(std::vector<double> probs) {
    if (probs.empty())
        throw domain_error("table law: empty table");
    while (probs.size() > 1 && probs.back() == 0.0)
        probs.pop_back();
    double sum = 0, comp = 0;
    long g = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0))
            throw domain_error("table law: negative entry at index " + std::to_string(i));
        if (probs[i] > 0)
            g = std::gcd(g, static_cast<long>(i) + 1);
        const double y = probs[i] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    if (sum <= 0 || std::fabs(sum - 1.0) > 1e-9)
        throw domain_error("table law: entries sum to " + dec17(sum) + ", not 1");
    if (g != 1)
        throw domain_error("table law: support has period " + std::to_string(g));
    for (auto& p : probs)
        p /= sum;
    InterArrivalLaw law;
    law.family_ = Family::table;
    law.head_ = std::move(probs);
    return law;
}

InterArrivalLaw InterArrivalLaw::table(std::vector<double> head, double tail_ratio) {
    if (tail_ratio == 0.0)
        return table(std::move(head));
    if (!(tail_ratio > 0) || !(tail_ratio < 1))
        throw domain_error("table law: geometric ratio must lie in (0,1)");
    if (head.empty() || !(head.back() > 0))
        throw domain_error("table law: geometric tail needs a positive last head entry");
    double sum = 0;
    for (size_t i = 0; i < head.size(); ++i) {
        if (!(head[i] >= 0))
            throw domain_error("table law: negative entry at index " + std::to_string(i));
        sum += head[i];
    }
    sum += head.back() * tail_ratio / (1.0 - tail_ratio);
    if (std::fabs(sum - 1.0) > 1e-9)
        throw domain_error("table law: total mass " + dec17(sum) + ", not 1");
    for (auto& p : head)
        p /= sum;
    InterArrivalLaw law;
    law.family_ = Family::table;
    law.head_ = std::move(head);
    law.tail_ratio_ = tail_ratio;
    return law;
}

InterArrivalLaw InterArrivalLaw::geometric(double p) {
    if (!(p > 0) || !(p < 1))
        throw domain_error("geometric law: p must lie in (0,1)");
    return table({1.0 - p}, p);
}

int InterArrivalLaw::support_start() const noexcept {
    switch (family_) {
    case Family::basic:
    case Family::logcorrected:
        return 1;
    case Family::shifted:
        return shift_ + 1;
    case Family::table:
        for (size_t i = 0; i < head_.size(); ++i)
            if (head_[i] > 0)
                return static_cast<int>(i) + 1;
        return 1; // unreachable: construction requires positive mass
    }
    return 1;
}

long InterArrivalLaw::support_end() const noexcept {
    if (family_ != Family::table || tail_ratio_ > 0)
        return -1;
    return static_cast<long>(head_.size());
}

bool InterArrivalLaw::finite_mean() const noexcept {
    return family_ == Family::table; // power-tail families have alpha < 1
}

double InterArrivalLaw::mean() const {
    if (!finite_mean())
        throw domain_error("mean: infinite for power-tail laws with alpha < 1");
    double m = 0;
    const long H = static_cast<long>(head_.size());
    for (long i = 0; i < H; ++i)
        m += static_cast<double>(i + 1) * head_[i];
    if (tail_ratio_ > 0) {
        const double r = tail_ratio_;
        m += head_[H - 1] * (static_cast<double>(H) * r / (1 - r) + r / ((1 - r) * (1 - r)));
    }
    return m;
}

bool InterArrivalLaw::singleton() const noexcept {
    if (family_ != Family::table || tail_ratio_ > 0)
        return false;
    int positive = 0;
    for (double p : head_)
        positive += (p > 0);
    return positive == 1;
}

double InterArrivalLaw::density(long n) const {
    if (n < 1)
        return 0.0;
    switch (family_) {
    case Family::basic:
        return basic_density_d(alpha_, n);
    case Family::shifted:
        return basic_density_d(alpha_, n - shift_);
    case Family::logcorrected:
        return basic_density_d(alpha_, n) *
               std::pow(std::log(static_cast<double>(n) + M_E), logpow_) / normalizer_;
    case Family::table: {
        const long H = static_cast<long>(head_.size());
        if (n <= H)
            return head_[n - 1];
        if (tail_ratio_ > 0)
            return head_[H - 1] * std::pow(tail_ratio_, static_cast<double>(n - H));
        return 0.0;
    }
    }
    return 0.0;
}

double InterArrivalLaw::log_density(long n) const {
    if (family_ == Family::table) {
        const long H = static_cast<long>(head_.size());
        if (n > H && tail_ratio_ > 0)
            return std::log(head_[H - 1]) + static_cast<double>(n - H) * std::log(tail_ratio_);
    }
    const double k = density(n);
    return k > 0 ? std::log(k) : -kInf;
}

double InterArrivalLaw::tail(long n) const {
    if (n < 1)
        return 1.0;
    switch (family_) {
    case Family::basic:
        return basic_tail_d(alpha_, n);
    case Family::shifted:
        return basic_tail_d(alpha_, n - shift_);
    case Family::logcorrected: {
        if (n >= kLcHead)
            return lc_tail_raw(alpha_, logpow_, n) / normalizer_;
        double sum = lc_tail_raw(alpha_, logpow_, kLcHead);
        double k = basic_density_d(alpha_, n + 1);
        for (long i = n + 1; i <= kLcHead; ++i) {
            sum += k * std::pow(std::log(static_cast<double>(i) + M_E), logpow_);
            k *= (static_cast<double>(i) - alpha_) / static_cast<double>(i + 1);
        }
        return sum / normalizer_;
    }
    case Family::table: {
        const long H = static_cast<long>(head_.size());
        const double r = tail_ratio_;
        if (n >= H)
            return r > 0 ? head_[H - 1] * std::pow(r, static_cast<double>(n - H + 1)) / (1 - r)
                         : 0.0;
        double sum = r > 0 ? head_[H - 1] * r / (1 - r) : 0.0;
        for (long i = n + 1; i <= H; ++i)
            sum += head_[i - 1];
        return sum;
    }
    }
    return 0.0;
}

double InterArrivalLaw::log_tail(long n) const {
    if (family_ == Family::table) {
        const long H = static_cast<long>(head_.size());
        if (n >= H && tail_ratio_ > 0)
            return std::log(head_[H - 1] * tail_ratio_ / (1 - tail_ratio_)) +
                   static_cast<double>(n - H) * std::log(tail_ratio_);
    }
    const double t = tail(n);
    return t > 0 ? std::log(t) : -kInf;
}

void InterArrivalLaw::base_weights(long n_max, std::vector<Real>& out) const {
    out.clear();
    out.resize(n_max + 1); // ambient precision zeros
    switch (family_) {
    case Family::basic:
    case Family::shifted:
    case Family::logcorrected: {
        const long m = (family_ == Family::shifted) ? shift_ : 0;
        const Real a(alpha_);
        Real w = a;
        if (family_ == Family::logcorrected) {
            const Real E = exp(Real(1));
            for (long n = 1; n + m <= n_max; ++n) {
                Real lf = log(Real(n) + E);
                Real lfj = 1;
                for (int i = 0; i < logpow_; ++i)
                    lfj *= lf;
                out[n + m] = w * lfj;
                w *= (Real(n) - a) / Real(n + 1);
            }
        } else {
            for (long n = 1; n + m <= n_max; ++n) {
                out[n + m] = w;
                w *= (Real(n) - a) / Real(n + 1);
            }
        }
        break;
    }
    case Family::table: {
        const long H = static_cast<long>(head_.size());
        for (long n = 1; n <= std::min(H, n_max); ++n)
            out[n] = Real(head_[n - 1]);
        if (tail_ratio_ > 0 && n_max > H) {
            const Real r(tail_ratio_);
            Real w = Real(head_[H - 1]);
            for (long n = H + 1; n <= n_max; ++n) {
                w *= r;
                out[n] = w;
            }
        }
        break;
    }
    }
}

double InterArrivalLaw::weight_normalizer() const {
    return normalizer_;
}

nlohmann::json InterArrivalLaw::to_json() const {
    nlohmann::json j;
    switch (family_) {
    case Family::basic:
        j["family"] = "basic";
        j["alpha"] = alpha_;
        break;
    case Family::shifted:
        j["family"] = "shifted";
        j["alpha"] = alpha_;
        j["shift"] = shift_;
        break;
    case Family::logcorrected:
        j["family"] = "logcorrected";
        j["alpha"] = alpha_;
        j["logpow"] = logpow_;
        break;
    case Family::table: {
        j["family"] = "table";
        auto arr = nlohmann::json::array();
        for (double p : head_)
            arr.push_back(dec17(p));
        j["table"] = std::move(arr);
        if (tail_ratio_ > 0)
            j["tail_ratio"] = dec17(tail_ratio_);
        break;
    }
    }
    return j;
}

InterArrivalLaw InterArrivalLaw::from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "basic")
        return basic(json_number(j.at("alpha")));
    if (family == "shifted")
        return shifted(json_number(j.at("alpha")), j.at("shift").get<int>());
    if (family == "logcorrected")
        return logcorrected(json_number(j.at("alpha")), j.at("logpow").get<int>());
    if (family == "table") {
        std::vector<double> head;
        for (const auto& v : j.at("table"))
            head.push_back(json_number(v));
        const double r = j.contains("tail_ratio") ? json_number(j.at("tail_ratio")) : 0.0;
        return table(std::move(head), r);
    }
    throw domain_error("law json: unknown family '" + family + "'");
}

bool InterArrivalLaw::operator==(const InterArrivalLaw& o) const noexcept {
    return family_ == o.family_ && alpha_ == o.alpha_ && shift_ == o.shift_ &&
           logpow_ == o.logpow_ && head_ == o.head_ && tail_ratio_ == o.tail_ratio_;
}

// ---------------------------------------------------------------- tilt

Real TiltedLaw::u_inf() const {
    return 1 / m_b;
}

void TiltedLaw::densities(long n_max, std::vector<Real>& out) const {
    ScopedPrecision scope(precision_bits);
    std::vector<Real> w;
    law.base_weights(n_max, w);
    out.clear();
    out.resize(n_max + 1);
    const Real eb = exp(-Real(b));
    Real pw = 1;
    for (long n = 1; n <= n_max; ++n) {
        pw *= eb;
        if (n % 512 == 0)
            pw = exp(-Real(b) * Real(n));
        if (!w[n].is_zero())
            out[n] = w[n] * pw / s_w;
    }
}

std::vector<double> TiltedLaw::densities_double(double tail_cut) const {
    std::vector<double> kb{0.0};
    const double cd = static_cast<double>(c_b);
    const double x = std::exp(-b);
    const long send = law.support_end();
    const long cap = 20000000;
    double cum = 0;
    double pw = 1;
    // stream K(n) for each family to keep the loop O(1) per step
    double kraw = 0; // basic-style running weight
    const double alpha = law.alpha();
    const long m = (law.family() == Family::shifted) ? law.shift() : 0;
    for (long n = 1;; ++n) {
        pw *= x;
        if (n % 512 == 0)
            pw = std::exp(-b * static_cast<double>(n));
        double k = 0;
        switch (law.family()) {
        case Family::basic:
        case Family::shifted:
        case Family::logcorrected: {
            const long i = n - m;
            if (i == 1)
                kraw = alpha;
            else if (i > 1)
                kraw *= (static_cast<double>(i - 1) - alpha) / static_cast<double>(i);
            k = (i >= 1) ? kraw : 0.0;
            if (law.family() == Family::logcorrected)
                k *= std::pow(std::log(static_cast<double>(n) + M_E), law.logpow()) /
                     law.weight_normalizer();
            break;
        }
        case Family::table:
            k = law.density(n);
            break;
        }
        kb.push_back(cd * k * pw);
        cum += kb.back();
        if (send > 0 && n >= send)
            break;
        if (1.0 - cum < tail_cut && n >= 2)
            break;
        if (n >= cap)
            throw precision_error("sampling table: tail cut not reached within budget");
    }
    for (auto& v : kb)
        v /= cum;
    return kb;
}

TiltedLaw tilt(const InterArrivalLaw& law, double b, PrecisionSpec prec, long n_hint) {
    if (b < 0)
        throw domain_error("tilt: b must be >= 0");
    if (b == 0 && !law.finite_mean())
        throw domain_error("tilt: b = 0 needs a finite-mean law");
    const int pbits = prec.resolve(b, n_hint);
    ScopedPrecision scope(pbits);

    TiltedLaw t{law};
    t.b = b;
    t.precision_bits = pbits;

    Real s0, s1;
    bool have_series = false;
    if (b > 0 || law.family() == Family::table) {
        weighted_tilt_sums(law, b, pbits, s0, s1);
        have_series = true;
    }

    // closed forms where the family admits one
    Real s_closed, m_closed;
    bool have_closed = false;
    if (law.family() == Family::basic || law.family() == Family::shifted) {
        const long m = (law.family() == Family::shifted) ? law.shift() : 0;
        const Real eb = exp(-Real(b));
        const Real q1 = pow(1 - eb, Real(law.alpha()));
        s_closed = exp(-Real(b) * Real(m)) * (1 - q1);
        const Real m_basic = Real(law.alpha()) * eb * pow(1 - eb, Real(law.alpha()) - 1) / (1 - q1);
        m_closed = Real(m) + m_basic;
        have_closed = true;
    }

    if (have_closed && have_series) {
        const Real m_series = s1 / s0;
        if (abs(s0 / s_closed - 1) > 1e-10 || abs(m_series / m_closed - 1) > 1e-10)
            throw precision_error("tilt: series and closed-form normalizations disagree");
    }

    if (have_closed) {
        t.s_w = s_closed;
        t.c_b = 1 / s_closed;
        t.m_b = m_closed;
    } else {
        t.s_w = s0;
        t.m_b = s1 / s0;
        t.c_b = (law.family() == Family::logcorrected) ? Real(law.weight_normalizer()) / s0
                                                       : 1 / s0;
    }
    t.degenerate = (t.m_b <= Real(1) + Real(1e-12));
    return t;
}

void tilted_tail_table(const TiltedLaw& tilted, long n_max, std::vector<Real>& out) {
    const int pbits = tilted.precision_bits;
    ScopedPrecision scope(pbits);
    const InterArrivalLaw& law = tilted.law;
    const double b = tilted.b;

    long t0;                 // backward-accumulation start
    Real seed = 0;           // sum_{j>t0} K_b(j), exact where available
    const long send = law.support_end();
    if (send > 0) {
        t0 = send;
    } else if (law.family() == Family::table) {
        const long H = static_cast<long>(law.head().size());
        t0 = std::max(n_max, H);
        const Real rho = Real(law.tail_ratio()) * exp(-Real(b));
        // sum_{j>t0} w(j) e^{-bj} = w(H) e^{-bH} rho^{t0-H} rho/(1-rho)
        seed = Real(law.head()[H - 1]) * exp(-Real(b) * Real(H)) *
               pow(rho, Real(t0 - H)) * rho / (1 - rho) / tilted.s_w;
    } else {
        // drop the tail once it is 2^-(P+48) of the scale at n_max
        t0 = n_max + static_cast<long>(std::ceil((pbits + 48) * M_LN2 / b)) + 64;
    }

    std::vector<Real> w;
    law.base_weights(t0, w);
    std::vector<Real> pw(t0 + 1);
    {
        const Real eb = exp(-Real(b));
        Real p = 1;
        for (long n = 1; n <= t0; ++n) {
            p *= eb;
            if (n % 512 == 0)
                p = exp(-Real(b) * Real(n));
            pw[n] = p;
        }
    }

    out.clear();
    out.resize(std::min(n_max, t0) + 1);
    Real acc = seed;
    // the loop below only writes indices < t0, but when t0 <= n_max the
    // slot at t0 is in range and its value is the seed itself
    if (t0 <= n_max)
        out[t0] = acc;
    const Real inv_sw = 1 / tilted.s_w;
    for (long n = t0 - 1; n >= 0; --n) {
        // acc += K_b(n+1), fused to round once per step
        Real kb = w[n + 1] * pw[n + 1];
        mpfr_fma(acc.backend().data(), kb.backend().data(), inv_sw.backend().data(),
                 acc.backend().data(), MPFR_RNDN);
        if (n <= n_max)
            out[n] = acc;
    }
    if (static_cast<long>(out.size()) <= n_max) {
        // finite support shorter than the horizon: zero tail beyond it
        out.resize(n_max + 1);
    }
    if (abs(out[0] - 1) > ldexp(Real(1), -(pbits - 32)))
        throw precision_error("tilted tail: normalization check failed at requested precision");
}

void mu_densities(const TiltedLaw& tilted, long n_max, std::vector<Real>& out) {
    tilted_tail_table(tilted, n_max, out);
    ScopedPrecision scope(tilted.precision_bits);
    for (auto& v : out)
        v /= tilted.m_b;
}

Real mu_density(const TiltedLaw& tilted, long n) {
    std::vector<Real> kbar;
    tilted_tail_table(tilted, n, kbar);
    return kbar[n] / tilted.m_b;
}

// ---------------------------------------------------------------- free energy

namespace {

// sum_n K(n) e^{-bn} in double, for the free-energy bisection
double tilt_sum_d(const InterArrivalLaw& law, double b) {
    switch (law.family()) {
    case Family::basic:
        return 1.0 - std::pow(1.0 - std::exp(-b), law.alpha());
    case Family::shifted:
        return std::exp(-b * law.shift()) *
               (1.0 - std::pow(1.0 - std::exp(-b), law.alpha()));
    case Family::table: {
        const auto& h = law.head();
        const long H = static_cast<long>(h.size());
        const double x = std::exp(-b);
        double s = 0, pw = 1;
        for (long i = 0; i < H; ++i) {
            pw *= x;
            s += h[i] * pw;
        }
        if (law.tail_ratio() > 0) {
            const double rho = law.tail_ratio() * x;
            s += h[H - 1] * pw * rho / (1.0 - rho);
        }
        return s;
    }
    case Family::logcorrected: {
        double sum = 0, comp = 0;
        double k = law.alpha();
        const double x = std::exp(-b);
        double pw = 1;
        for (long n = 1; n <= 50000000; ++n) {
            pw *= x;
            const double term =
                k * std::pow(std::log(static_cast<double>(n) + M_E), law.logpow()) * pw /
                law.weight_normalizer();
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            if (term < 1e-18 * sum && n > 8)
                return sum;
            k *= (static_cast<double>(n) - law.alpha()) / static_cast<double>(n + 1);
        }
        throw precision_error("free energy: tilted sum did not converge");
    }
    }
    return 0;
}

} // namespace

double free_energy(const InterArrivalLaw& law, double beta, double tol) {
    if (!(beta > 0))
        throw domain_error("free energy: beta must be > 0 (localized regime)");
    if (!(tol > 0))
        throw domain_error("free energy: tolerance must be > 0");
    const double target = std::exp(-beta);
    double lo = 0, hi = 1;
    int guard = 0;
    while (tilt_sum_d(law, hi) > target) {
        hi *= 2;
        if (++guard > 60)
            throw precision_error("free energy: bracketing failed");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (tilt_sum_d(law, mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace renew
