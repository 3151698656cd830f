#pragma once

#include "dynlab/types.hpp"

namespace dynlab {

inline constexpr int max_permanent_size = 14;

/// Permanent by Ryser's inclusion-exclusion formula, visiting column subsets
/// in Gray-code order. Sizes above max_permanent_size throw InvalidInput.
double permanent(const Mat& a, Exec exec = Exec::parallel);

}  // namespace dynlab
