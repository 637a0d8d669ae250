#pragma once

#include <complex>
#include <vector>

#include "renew/laws.hpp"

namespace renew {

using Complex = std::complex<double>;

// A refined zero of f(z) = 1 - Khat_b(z) in the annulus 1 < |z| <= e^b.
// Nonreal zeros always come in conjugate pairs. pole_coefficient is the
// residue factor 1/(z0 Khat_b'(z0)): near a simple zero,
// uhat(z) = 1/(1-Khat_b(z)) ~ pole_coefficient / (1 - z/z0), so the zero
// contributes pole_coefficient * z0^{-n} to d(n).
struct RootReport {
    Complex z0;
    double modulus = 0;
    Complex khat_derivative;
    Complex pole_coefficient;
    double residual = 0; // |1 - Khat_b(z0)| after refinement
};

struct AnnulusCount {
    double r_in = 0;
    double r_out = 0;
    long count = 0;           // winding(r_out) - winding(r_in)
    long winding_samples = 0; // total contour evaluations used
};

// Khat_b(z) = sum_n K_b(n) z^n. Inside |z| < e^b this is the truncated
// series with an explicit geometric tail bound below tol; basic and
// shifted laws instead use the closed form
//   Khat_b(z) = c(b) (1 - (1 - z e^{-b})^alpha) * z^m,
// principal branch, which extends continuously everywhere off the cut
// {real z > e^b}. Throws domain_error outside the convergence region with
// no closed form, and for real z > e^b on the cut line.
Complex khat(const TiltedLaw& tilted, Complex z, double tol = 1e-14);
Complex khat_derivative(const TiltedLaw& tilted, Complex z, double tol = 1e-14);

// The series route on its own, for any family (cross-checks the closed
// forms). Requires the truncation to converge: |z| < e^b for infinite
// supports, |z| < e^b / tail_ratio for geometric-tail tables.
Complex khat_series(const TiltedLaw& tilted, Complex z, double tol = 1e-14);

// Delta_b(z) = sum_n d(n) z^n = 1/(1-Khat_b(z)) - u_inf/(1-z) for
// |z| < e^b. The z = 1 singularity is removable; within |z-1| < 0.05 the
// value is taken from a partial sum over delta_series coefficients
// instead of the (ill-conditioned) difference of the two poles.
// Throws singular_error at zeros of 1 - Khat_b.
Complex delta_transform(const TiltedLaw& tilted, Complex z);

// muhat_b(z) by direct series over mu_b(n) and by the closed form
// (1 - Khat_b(z)) / (m_b (1-z)), plus the residual of the identity
// grad_uhat(z) = 1/(m_b muhat_b(z)) with grad_uhat a partial sum of
// n_terms increments u(n)-u(n-1). Throws singular_error at z in {0, 1}.
struct MuhatResult {
    Complex by_series;
    Complex by_closed_form;
    double grubel_residual = 0;
    long n_terms = 0;
};
MuhatResult muhat_and_grubel_check(const TiltedLaw& tilted, Complex z, long n_terms = 500);

// Zeros of 1 - Khat_b strictly inside r_in < |z| < r_out, counted as the
// difference of unwrapped-argument winding numbers on the two circles.
// Requires 1 < r_in < r_out <= e^b; the ever-present simple zero at z = 1
// sits inside both circles and cancels. Sampling on each circle doubles
// until every argument step is < pi/2; throws singular_error when a
// contour passes too close to a zero (min |f| on the circle under 10x the
// local evaluation error) or when the sample budget is exhausted.
AnnulusCount count_zeros(const TiltedLaw& tilted, double r_in, double r_out,
                         long sample_budget = (1L << 23));

// Newton refinement of every zero in the annulus (r_in, r_out), seeded
// from a polar grid; duplicates merged at distance 1e-8, conjugates
// closed, near-real roots snapped. r_in/r_out <= 0 pick the default
// annulus (1 + 1e-4 b, e^b (1 - 1e-6)). The result is verified against
// count_zeros on the same annulus (with one grid doubling retry);
// disagreement throws count_mismatch_error. Roots sorted by modulus,
// then argument.
std::vector<RootReport> find_roots(const TiltedLaw& tilted, double r_out = 0,
                                   double r_in = 0, int grid_radial = 24,
                                   int grid_angular = 48,
                                   long sample_budget = (1L << 23));

// Critical tilt b0: the infimum of b for which 1 - Khat_b has a zero in
// 1 < |z| <= e^b. Bisects the count_zeros >= 1 predicate over [b_lo, b_hi]
// with annulus margins (1 + 1e-4 b, e^b - eps_out); the outer clearance
// eps_out shrinks with tol so the margin-induced bias stays below the
// returned accuracy. Returns +infinity when the predicate is still false
// at b_hi. Throws domain_error if the predicate already holds at b_lo.
double critical_tilt(const InterArrivalLaw& law, double b_lo, double b_hi,
                     double tol = 1e-6);

// Predicted leading behavior of d(n): sum of pole_coefficient * z0^{-n}
// over the roots of minimal modulus (conjugate pairs combine into a real
// cosine form). Empty root list predicts 0. Throws singular_error if a
// root fails the simplicity threshold |Khat_b'(z0)| > 1e-8.
double pole_asymptote(const std::vector<RootReport>& roots, long n);

} // namespace renew
