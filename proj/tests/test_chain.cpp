#include "doctest.h"

#include <random>

#include "dynlab/chain.hpp"
#include "dynlab/random_models.hpp"
#include "dynlab/rng.hpp"

using namespace dynlab;

namespace {

double m_inner(const Vec& m, const Vec& f, const Vec& g)
{
    return (f.cwiseProduct(g)).dot(m);
}

CVec random_complex(int n, Rng& rng)
{
    std::normal_distribution<double> normal;
    CVec z(n);
    for (int i = 0; i < n; ++i) {
        z(i) = Complex(normal(rng), normal(rng));
    }
    return z;
}

}  // namespace

TEST_CASE("N-chain potential and reference measure")
{
    const DualPair dp = build_dual(n_chain(3));
    CHECK((dp.m - Vec::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(dp.V(i, j) == doctest::Approx(i <= j ? 1.0 : 0.0));
        }
    }
    // mu_hat is the law of the last state: killed only from N.
    CHECK(dp.mu_hat(2) == doctest::Approx(1.0));
    CHECK(dp.mu_hat.head(2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("no jumps: self-dual with m = mu")
{
    ChainSpec spec;
    spec.q = Vec::Ones(3);
    spec.pi = Mat::Zero(3, 3);
    spec.mu = Vec(3);
    spec.mu << 0.2, 0.3, 0.5;
    const DualPair dp = build_dual(spec);
    CHECK((dp.L + Mat::Identity(3, 3)).norm() == 0.0);
    CHECK((dp.L_hat + Mat::Identity(3, 3)).norm() == 0.0);
    CHECK((dp.m - spec.mu).norm() < 1e-15);
    CHECK((dp.mu_hat - spec.mu).norm() < 1e-15);
}

TEST_CASE("m-duality, potential residual and m = mu_hat V_hat on random chains")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int n = 2 + static_cast<int>(seed % 5);
        const DualPair dp = build_dual(random_chain(n, seed));
        Rng rng = make_rng(seed, Stream::models, 99);
        std::normal_distribution<double> normal;
        for (int t = 0; t < 100; ++t) {
            Vec f(n), g(n);
            for (int i = 0; i < n; ++i) {
                f(i) = normal(rng);
                g(i) = normal(rng);
            }
            const double lhs = m_inner(dp.m, dp.L * f, g), rhs = m_inner(dp.m, f, dp.L_hat * g);
            const double scale = dp.L.cwiseAbs().maxCoeff() * dp.m.maxCoeff() * f.norm() * g.norm();
            CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
        }
        CHECK((dp.V * (-dp.L) - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(dp.V.minCoeff() >= -1e-12);
        const Mat v_hat = (-dp.L_hat).inverse();
        CHECK((v_hat.transpose() * dp.mu_hat - dp.m).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(dp.mu_hat.sum() == doctest::Approx(1.0).epsilon(1e-12));
        // Pi_hat is substochastic and reproduces L_hat with the same q.
        CHECK(dp.pi_hat.minCoeff() >= 0.0);
        CHECK(dp.pi_hat.rowwise().sum().maxCoeff() <= 1.0 + 1e-12);
        const Mat l_hat = dp.q().asDiagonal() * (dp.pi_hat - Mat::Identity(n, n));
        CHECK((l_hat - dp.L_hat).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dual of the dual returns the original generator")
{
    const DualPair dp = build_dual(random_chain(5, 42));
    const DualPair dd = dual_of(dual_of(dp));
    CHECK((dd.L - dp.L).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((dd.m - dp.m).cwiseAbs().maxCoeff() <= 1e-10);
    const DualPair d1 = dual_of(dp);
    CHECK((d1.m - dp.m).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((d1.L - dp.L_hat).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("invalid chains are rejected")
{
    ChainSpec good = n_chain(3);
    SUBCASE("negative rate")
    {
        good.q(1) = -1.0;
        CHECK_THROWS_AS(build_dual(good), InvalidInput);
    }
    SUBCASE("row sum above one")
    {
        good.pi(0, 2) = 0.5;
        CHECK_THROWS_AS(build_dual(good), InvalidInput);
    }
    SUBCASE("recurrent class with no killing")
    {
        ChainSpec s;
        s.q = Vec::Ones(3);
        s.pi = Mat::Zero(3, 3);
        s.pi(0, 1) = 0.5;
        s.pi(1, 2) = 1.0;
        s.pi(2, 1) = 1.0;
        s.mu = Vec::Unit(3, 0);
        CHECK_THROWS_AS(build_dual(s), InvalidInput);
    }
    SUBCASE("state unreachable from the initial law gives m = 0")
    {
        good.mu = Vec::Unit(3, 1);
        CHECK_THROWS_AS(build_dual(good), InvalidInput);
    }
    SUBCASE("mu not a probability")
    {
        good.mu(0) = 0.5;
        CHECK_THROWS_AS(build_dual(good), InvalidInput);
    }
    SUBCASE("dimension mismatch")
    {
        good.mu = Vec::Ones(2) / 2.0;
        CHECK_THROWS_AS(build_dual(good), InvalidInput);
    }
}

TEST_CASE("spectral radius: eigensolver and power iteration agree")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const ChainSpec s = random_chain(6, seed);
        const double r = spectral_radius(s.pi);
        CHECK(r < 1.0);
        CHECK(power_iteration_radius(s.pi) == doctest::Approx(r).epsilon(1e-8));
    }
}

TEST_CASE("energy report")
{
    SUBCASE("scalar chain has gap 1")
    {
        ChainSpec s;
        s.q = Vec::Ones(1);
        s.pi = Mat::Zero(1, 1);
        s.mu = Vec::Ones(1);
        CHECK(energy_report(build_dual(s)).mass_gap == doctest::Approx(1.0));
    }
    SUBCASE("N-chain gap matches the tridiagonal eigensolver oracle")
    {
        for (int n = 1; n <= 10; ++n) {
            Mat t = Mat::Zero(n, n);
            for (int i = 0; i + 1 < n; ++i) {
                t(i, i + 1) = t(i + 1, i) = 0.5;
            }
            const double oracle = 1.0 - Eigen::SelfAdjointEigenSolver<Mat>(t).eigenvalues().maxCoeff();
            CHECK(energy_report(build_dual(n_chain(n))).mass_gap == doctest::Approx(oracle).epsilon(1e-12));
        }
    }
    SUBCASE("energy bound, decomposition and symmetry on random chains")
    {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const DualPair dp = build_dual(random_chain(5, seed));
            const EnergyReport er = energy_report(dp);
            CHECK(er.mass_gap > 0.0);
            CHECK((er.conductances - er.conductances.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(er.killing.minCoeff() >= 0.0);
            Rng rng = make_rng(seed, Stream::models, 7);
            for (int t = 0; t < 1000; ++t) {
                const CVec z = random_complex(5, rng);
                const double e = energy(dp, z);
                double norm_m = 0.0;
                for (int x = 0; x < 5; ++x) {
                    norm_m += std::norm(z(x)) * dp.m(x);
                }
                CHECK(e - er.mass_gap * norm_m >= -1e-10);
                CHECK(energy_from_report(er, dp, z) == doctest::Approx(e).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("trace chain")
{
    SUBCASE("full subset is the identity")
    {
        const DualPair dp = build_dual(random_chain(4, 3));
        const std::vector<int> all{0, 1, 2, 3};
        const DualPair t = trace_chain(dp, all);
        CHECK((t.L - dp.L).norm() == 0.0);
    }
    SUBCASE("N-chain on {1,3}")
    {
        const DualPair dp = build_dual(n_chain(3));
        const std::vector<int> y{0, 2};
        const DualPair t = trace_chain(dp, y);
        CHECK(t.V(0, 0) == doctest::Approx(1.0));
        CHECK(t.V(0, 1) == doctest::Approx(1.0));
        CHECK(std::abs(t.V(1, 0)) < 1e-14);
        CHECK(t.V(1, 1) == doctest::Approx(1.0));
        CHECK((t.m - Vec::Ones(2)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("random chains: potential and measure restrict")
    {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const DualPair dp = build_dual(random_chain(6, seed));
            const std::vector<int> y{static_cast<int>(seed % 2), 3, 5};
            const DualPair t = trace_chain(dp, y);
            CHECK((t.V - dp.V(y, y)).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((t.m - dp.m(y)).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
    SUBCASE("tracing in two steps equals tracing once")
    {
        const DualPair dp = build_dual(random_chain(6, 11));
        const std::vector<int> y{0, 2, 3, 5}, y_prime{2, 5};
        const std::vector<int> y_prime_in_y{1, 3};
        const DualPair two = trace_chain(trace_chain(dp, y), y_prime_in_y);
        const DualPair one = trace_chain(dp, y_prime);
        CHECK((two.L - one.L).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((two.m - one.m).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("bad subsets")
    {
        const DualPair dp = build_dual(n_chain(3));
        CHECK_THROWS_AS(trace_chain(dp, std::vector<int>{}), InvalidInput);
        CHECK_THROWS_AS(trace_chain(dp, std::vector<int>{0, 0}), InvalidInput);
        CHECK_THROWS_AS(trace_chain(dp, std::vector<int>{3}), InvalidInput);
    }
}
