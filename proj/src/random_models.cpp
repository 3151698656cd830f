#include "dynlab/random_models.hpp"

#include <random>

#include "dynlab/rng.hpp"

namespace dynlab {

ChainSpec random_chain(int n, std::uint64_t seed, const RandomChainOptions& options)
{
    if (n < 1) {
        throw InvalidInput("random_chain needs n >= 1");
    }
    Rng rng = make_rng(seed, Stream::models);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    ChainSpec spec;
    spec.q.resize(n);
    spec.pi = Mat::Zero(n, n);
    spec.mu.resize(n);
    for (int x = 0; x < n; ++x) {
        spec.q(x) = uniform(options.min_rate, options.max_rate);
        if (n == 1) {
            spec.pi(0, 0) = 0.0;
            break;
        }
        for (int y = 0; y < n; ++y) {
            if (y == x) {
                continue;
            }
            const bool cycle = y == (x + 1) % n;
            if (cycle || unit(rng) < options.density) {
                spec.pi(x, y) = 0.05 + unit(rng);
            }
        }
        const double row = uniform(options.min_row_sum, options.max_row_sum);
        spec.pi.row(x) *= row / spec.pi.row(x).sum();
    }
    for (int x = 0; x < n; ++x) {
        spec.mu(x) = 0.1 + unit(rng);
    }
    spec.mu /= spec.mu.sum();
    return spec;
}

Mat random_matrix(int n, std::uint64_t seed, double scale)
{
    Rng rng = make_rng(seed, Stream::models);
    std::normal_distribution<double> normal(0.0, scale / std::sqrt(static_cast<double>(std::max(n, 1))));
    Mat a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = normal(rng);
        }
    }
    return a;
}

Mat random_skew(int n, std::uint64_t seed, double scale)
{
    const Mat a = random_matrix(n, seed, scale);
    return 0.5 * (a - a.transpose());
}

Mat random_psd(int n, std::uint64_t seed, double scale)
{
    const Mat a = random_matrix(n, seed, 1.0);
    return scale * (a * a.transpose()) / 2.0;
}

Vec random_vector(int n, std::uint64_t seed, double lo, double hi)
{
    Rng rng = make_rng(seed, Stream::models);
    std::uniform_real_distribution<double> unit(lo, hi);
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = unit(rng);
    }
    return v;
}

}  // namespace dynlab
