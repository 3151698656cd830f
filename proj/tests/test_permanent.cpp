#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "dynlab/permanent.hpp"
#include "dynlab/random_models.hpp"

using namespace dynlab;

namespace {

double brute_permanent(const Mat& a)
{
    const int n = static_cast<int>(a.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0.0;
    do {
        double prod = 1.0;
        for (int i = 0; i < n; ++i) {
            prod *= a(i, perm[static_cast<std::size_t>(i)]);
        }
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

}  // namespace

TEST_CASE("small permanents")
{
    Mat one(1, 1);
    one << 3.5;
    CHECK(permanent(one) == 3.5);
    Mat two(2, 2);
    two << 1, 2, 3, 4;
    CHECK(permanent(two) == doctest::Approx(1 * 4 + 2 * 3));
    CHECK(permanent(Mat(0, 0)) == 1.0);
    CHECK(permanent(Mat::Ones(2, 2)) == doctest::Approx(2.0));
    CHECK(permanent(Mat::Ones(5, 5)) == doctest::Approx(120.0));
}

TEST_CASE("Ryser matches brute force")
{
    for (int n = 1; n <= 8; ++n) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Mat a = random_matrix(n, seed * 31 + static_cast<std::uint64_t>(n));
            const double oracle = brute_permanent(a);
            const double scale = std::max(1.0, a.cwiseAbs().rowwise().sum().prod());
            CHECK(std::abs(permanent(a, Exec::serial) - oracle) <= 1e-12 * scale);
            CHECK(std::abs(permanent(a, Exec::parallel) - oracle) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("permanent is invariant under row and column permutations")
{
    const Mat a = random_matrix(6, 4);
    Mat b = a;
    b.row(0).swap(b.row(4));
    b.col(1).swap(b.col(5));
    CHECK(permanent(b) == doctest::Approx(permanent(a)).epsilon(1e-12));
}

TEST_CASE("permanent size limit")
{
    CHECK_THROWS_AS(permanent(Mat::Ones(max_permanent_size + 1, max_permanent_size + 1)), InvalidInput);
    CHECK_THROWS_AS(permanent(Mat::Ones(2, 3)), InvalidInput);
}
