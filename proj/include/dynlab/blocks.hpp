#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dynlab/types.hpp"

namespace dynlab {

/// Fixed partition of `count` replicas into contiguous blocks. The partition
/// depends only on `count`, never on the thread count, which is what makes the
/// parallel and serial drivers agree bit for bit.
class BlockPlan {
public:
    static constexpr std::size_t max_blocks = 256;

    explicit BlockPlan(std::size_t count)
        : count_(count), blocks_(std::min(count, max_blocks))
    {
    }

    std::size_t count() const { return count_; }
    std::size_t blocks() const { return blocks_; }

    std::size_t begin(std::size_t b) const
    {
        const std::size_t base = count_ / blocks_, extra = count_ % blocks_;
        return b * base + std::min(b, extra);
    }
    std::size_t end(std::size_t b) const { return begin(b + 1); }

private:
    std::size_t count_;
    std::size_t blocks_;
};

/// Runs `kernel(block, begin, end) -> Acc` over every block and merges the
/// partial accumulators in block order with `Acc::merge`.
template <class Acc, class Kernel>
Acc run_blocks(std::size_t count, Exec exec, const Kernel& kernel)
{
    const BlockPlan plan(count);
    std::vector<Acc> partial(plan.blocks());
    const auto nb = static_cast<long>(plan.blocks());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long b = 0; b < nb; ++b) {
            const auto ub = static_cast<std::size_t>(b);
            partial[ub] = kernel(ub, plan.begin(ub), plan.end(ub));
        }
    } else {
        for (long b = 0; b < nb; ++b) {
            const auto ub = static_cast<std::size_t>(b);
            partial[ub] = kernel(ub, plan.begin(ub), plan.end(ub));
        }
    }
    Acc total{};
    for (auto& p : partial) {
        total.merge(p);
    }
    return total;
}

}  // namespace dynlab
