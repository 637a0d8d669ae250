#include "renew/precision.hpp"

#include <cmath>
#include <limits>

#include <mpfr.h>

namespace renew {

namespace {
constexpr double kLog10Of2 = 0.30102999566398119521;
}

int PrecisionSpec::resolve(double b, long n_max) const {
    if (!is_auto())
        return bits;
    const double bn = std::max(0.0, b) * static_cast<double>(std::max(0L, n_max));
    const double need = 1.5 * bn / M_LN2;
    if (need > 1e9)
        throw domain_error("precision: automatic rule asks for over 1e9 bits (b*n_max too large)");
    return std::max(64, static_cast<int>(std::ceil(need)) + 64);
}

unsigned ScopedPrecision::digits10_for_bits(int bits) {
    return static_cast<unsigned>(std::ceil(bits * kLog10Of2)) + 3;
}

ScopedPrecision::ScopedPrecision(int bits) : prev_digits10_(Real::default_precision()) {
    if (bits < 2)
        throw domain_error("precision: nonsense bit count " + std::to_string(bits));
    Real::default_precision(digits10_for_bits(bits));
}

ScopedPrecision::~ScopedPrecision() {
    Real::default_precision(prev_digits10_);
}

int bits_of(const Real& x) {
    return static_cast<int>(mpfr_get_prec(x.backend().data()));
}

std::string decimal_string(const Real& x) {
    const unsigned digits = static_cast<unsigned>(std::ceil(bits_of(x) * kLog10Of2)) + 3;
    return x.str(digits, std::ios_base::scientific);
}

Real parse_real(const std::string& s, int bits) {
    ScopedPrecision scope(bits);
    return Real(s);
}

double log_abs(const Real& x) {
    const auto* d = x.backend().data();
    if (mpfr_zero_p(d))
        return -std::numeric_limits<double>::infinity();
    long exp = 0;
    const double mant = mpfr_get_d_2exp(&exp, d, MPFR_RNDN);
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * M_LN2;
}

} // namespace renew
