#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "renew/errors.hpp"
#include "renew/precision.hpp"

namespace renew {

enum class Family { basic, shifted, logcorrected, table };

// Aperiodic probability laws on {1, 2, ...}. The power-tail families obey
// K(n) ~ n^{-(1+alpha)} / (-Gamma(-alpha)) with alpha in (0,1):
//   basic:        K(n) = Gamma(n-alpha) / (-Gamma(-alpha) n!)
//   shifted:      the basic law translated right by m steps
//   logcorrected: basic weights times (log(n+e))^j, renormalized
//   table:        explicit head probabilities, optionally continued by a
//                 geometric tail K(n+1) = r K(n) past the head
// Laws are immutable values; all numeric evaluation happens at the caller's
// active precision (see PrecisionSpec).
class InterArrivalLaw {
public:
    static InterArrivalLaw basic(double alpha);
    static InterArrivalLaw shifted(double alpha, int m);
    static InterArrivalLaw logcorrected(double alpha, int logpow);
    static InterArrivalLaw table(std::vector<double> probs);
    static InterArrivalLaw table(std::vector<double> head, double tail_ratio);
    static InterArrivalLaw geometric(double p); // K(n) = (1-p) p^{n-1}

    Family family() const noexcept { return family_; }
    double alpha() const noexcept { return alpha_; }
    int shift() const noexcept { return shift_; }
    int logpow() const noexcept { return logpow_; }
    const std::vector<double>& head() const noexcept { return head_; }
    double tail_ratio() const noexcept { return tail_ratio_; }

    int support_start() const noexcept;
    long support_end() const noexcept;   // -1 when the support is infinite
    bool finite_mean() const noexcept;   // mean of the untilted law
    double mean() const;                 // requires finite_mean()
    bool singleton() const noexcept;     // single-point support (degenerate renewal)

    double density(long n) const;        // K(n)
    double log_density(long n) const;    // log K(n), -inf off the support
    double tail(long n) const;           // sum_{j > n} K(j)
    double log_tail(long n) const;       // log of the above, -inf when empty

    // Unnormalized weights w(n) proportional to K(n), n = 0..n_max, at the
    // active Real precision. The normalizer is exactly 1 for every family
    // except logcorrected, whose infinite weight sum converges too slowly
    // (tail ~ N^{-alpha} log^j N) for summation beyond double accuracy; all
    // tilted quantities are formed as ratios in which it cancels.
    void base_weights(long n_max, std::vector<Real>& out) const;
    double weight_normalizer() const;

    nlohmann::json to_json() const;
    static InterArrivalLaw from_json(const nlohmann::json& j);
    bool operator==(const InterArrivalLaw& o) const noexcept;

private:
    InterArrivalLaw() = default;

    Family family_ = Family::basic;
    double alpha_ = 0;
    int shift_ = 0;
    int logpow_ = 0;
    std::vector<double> head_;
    double tail_ratio_ = 0;
    double normalizer_ = 1; // logcorrected weight sum (double accuracy)
};

// Exponentially tilted law K_b(n) = c(b) K(n) e^{-bn} with
// c(b) = 1 / sum_n K(n) e^{-bn}, so c(0) = 1 and K_b is again a law.
// b = 0 is accepted only for laws with finite untilted mean.
struct TiltedLaw {
    explicit TiltedLaw(InterArrivalLaw l) : law(std::move(l)) {}

    InterArrivalLaw law;
    double b = 0;
    int precision_bits = 64;
    Real c_b;     // tilt normalizer; for logcorrected only double-accurate
    Real m_b;     // tilted mean sum_n n K_b(n)
    Real s_w;     // sum_n w(n) e^{-bn} at full precision (internal)
    bool degenerate = false; // m_b == 1

    double c() const { return static_cast<double>(c_b); }
    double m() const { return static_cast<double>(m_b); }
    Real u_inf() const;

    // K_b(n), n = 0..n_max, at the stored precision.
    void densities(long n_max, std::vector<Real>& out) const;

    // Double-precision K_b table truncated where the tilted tail drops
    // below tail_cut, renormalized (sampling support).
    std::vector<double> densities_double(double tail_cut = 1e-15) const;
};

// n_hint feeds the automatic precision rule (pass the n_max the tilted law
// will be used with; renewal entry points re-tilt if they need more bits).
TiltedLaw tilt(const InterArrivalLaw& law, double b, PrecisionSpec prec = {}, long n_hint = 0);

// mu_b(n) = Kbar_b(n) / m_b where Kbar_b(n) = sum_{j>n} K_b(j), so
// Kbar_b(0) = 1 and sum_n mu_b(n) = 1. Computed by backward tail
// accumulation at the tilted law's precision.
void mu_densities(const TiltedLaw& tilted, long n_max, std::vector<Real>& out);
Real mu_density(const TiltedLaw& tilted, long n);

// Kbar_b(n) = sum_{j>n} K_b(j) for n = 0..n_max, accumulated backward from
// an exact geometric seed (table laws) or from a truncation point far
// enough out that the dropped mass is below the rounding floor at n_max.
// Never formed as 1 - partial sum. Checks Kbar_b(0) = 1 on exit.
void tilted_tail_table(const TiltedLaw& tilted, long n_max, std::vector<Real>& out);

// The unique b >= 0 with sum_n K(n) e^{-bn} = e^{-beta} (beta > 0), located
// by bisection on the strictly decreasing left-hand side.
double free_energy(const InterArrivalLaw& law, double beta, double tol = 1e-12);

} // namespace renew
