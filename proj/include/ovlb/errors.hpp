#pragma once

#include <stdexcept>

namespace ovlb {

/// Bad caller input: dimension mismatches, malformed files, invalid parameters.
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, singular bases, solver breakdown.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ovlb
