#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>

#include "renew/errors.hpp"

namespace renew {

namespace mp = boost::multiprecision;

// Extended-precision real. Variable precision, set per thread via
// ScopedPrecision; every variable carries the precision it was created with.
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

// Precision request. bits == 0 selects the automatic rule
//   P = max(64, ceil(1.5 * b * n_max / ln 2) + 64).
// The renewal recursions accumulate absolute error ~ 2^-P per step on
// quantities of order 1 while the delta sequence lives at scale e^{-b n},
// i.e. 2^{-b n / ln2}; 1.5x that exponent plus 64 guard bits keeps the
// smallest value of interest at least ~(P/3) bits above the noise floor.
struct PrecisionSpec {
    int bits = 0;

    static PrecisionSpec auto_rule() noexcept { return {}; }
    static PrecisionSpec exact(int bits) {
        if (bits < 64)
            throw domain_error("precision: need at least 64 bits, got " + std::to_string(bits));
        return PrecisionSpec{bits};
    }

    bool is_auto() const noexcept { return bits == 0; }
    int resolve(double b, long n_max) const;
};

// RAII switch of the process-default precision for newly constructed Reals.
// Extended-precision arithmetic stays on one thread at a time (the parallel
// parts of this library work in doubles), so a process-wide default is safe.
class ScopedPrecision {
public:
    explicit ScopedPrecision(int bits);
    ~ScopedPrecision();
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

    static unsigned digits10_for_bits(int bits);

private:
    unsigned prev_digits10_;
};

// Actual significand bits carried by x.
int bits_of(const Real& x);

// Decimal string with enough digits to reparse to the identical value.
std::string decimal_string(const Real& x);

// Parse a decimal string at the given precision.
Real parse_real(const std::string& s, int bits);

// log|x| as a double (valid far outside double range); -inf for x == 0.
double log_abs(const Real& x);

} // namespace renew
