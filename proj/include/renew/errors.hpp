#pragma once

#include <stdexcept>
#include <string>

namespace renew {

// Error taxonomy shared with the CLI exit codes:
//   domain/usage -> 1, precision -> 2, singularity -> 3, count mismatch -> 4.

// Bad parameters or preconditions (negative mass, periodic support, b < 0,
// window too small, ...).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Too few usable points after floor filtering.
struct insufficient_data_error : domain_error {
    using domain_error::domain_error;
};

// A requested tolerance is unreachable at the configured precision or
// within the series budget, or a dual-path cross-check failed.
struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation at/too close to a singular point: zero on a contour, the
// branch cut of the closed form, z in {0,1}, or a contour sample budget
// exhausted while resolving a near-contour zero.
struct singular_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Winding-number count and refined root list disagree after grid refinement.
struct count_mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace renew
