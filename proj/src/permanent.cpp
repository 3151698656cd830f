#include "dynlab/permanent.hpp"

#include <bit>
#include <cstdint>

#include <fmt/core.h>

#include "dynlab/blocks.hpp"

namespace dynlab {

namespace {

struct SumAcc {
    double sum = 0.0;
    void merge(const SumAcc& o) { sum += o.sum; }
};

}  // namespace

double permanent(const Mat& a, Exec exec)
{
    if (a.rows() != a.cols()) {
        throw InvalidInput("permanent needs a square matrix");
    }
    const int n = static_cast<int>(a.rows());
    if (n > max_permanent_size) {
        throw InvalidInput(fmt::format("permanent of a {}x{} matrix exceeds the size cap {}", n, n, max_permanent_size));
    }
    if (n == 0) {
        return 1.0;
    }

    // Subsets are indexed k = 1 .. 2^n - 1 and visited as Gray codes g(k).
    const std::uint64_t subsets = (std::uint64_t{1} << n) - 1;
    const auto kernel = [&](std::size_t, std::size_t begin, std::size_t end) {
        const std::uint64_t k0 = begin + 1;
        std::uint64_t code = (k0 - 1) ^ ((k0 - 1) >> 1);
        Vec rows = Vec::Zero(n);
        for (int j = 0; j < n; ++j) {
            if (code >> j & 1U) {
                rows += a.col(j);
            }
        }
        SumAcc acc;
        for (std::uint64_t k = k0; k <= end; ++k) {
            const int j = std::countr_zero(k);
            code ^= std::uint64_t{1} << j;
            if (code >> j & 1U) {
                rows += a.col(j);
            } else {
                rows -= a.col(j);
            }
            const double term = rows.prod();
            acc.sum += (std::popcount(code) & 1) ? -term : term;
        }
        return acc;
    };
    const double total = run_blocks<SumAcc>(subsets, exec, kernel).sum;
    return (n & 1) ? -total : total;
}

}  // namespace dynlab
