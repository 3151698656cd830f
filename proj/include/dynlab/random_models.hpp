#pragma once

#include <cstdint>

#include "dynlab/chain.hpp"
#include "dynlab/types.hpp"

namespace dynlab {

struct RandomChainOptions {
    double min_rate = 0.5;
    double max_rate = 2.0;
    /// Row sums of Pi are drawn uniformly from [min_row_sum, max_row_sum].
    double min_row_sum = 0.5;
    double max_row_sum = 0.95;
    /// Probability that an off-diagonal, off-cycle edge is present.
    double density = 0.6;
};

/// Random transient chain on n states. A cycle 0 -> 1 -> ... -> 0 is always
/// present so every state is reachable; the initial law has full support.
ChainSpec random_chain(int n, std::uint64_t seed, const RandomChainOptions& options = {});

Mat random_matrix(int n, std::uint64_t seed, double scale = 1.0);
Mat random_skew(int n, std::uint64_t seed, double scale = 1.0);
/// Random symmetric nonnegative matrix G G^T scaled to spectral size ~ scale.
Mat random_psd(int n, std::uint64_t seed, double scale = 1.0);
Vec random_vector(int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

}  // namespace dynlab
