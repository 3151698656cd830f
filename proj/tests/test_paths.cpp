#include "doctest.h"

#include <cmath>

#include "dynlab/chain.hpp"
#include "dynlab/paths.hpp"
#include "dynlab/random_models.hpp"
#include "dynlab/twisted.hpp"

using namespace dynlab;

TEST_CASE("path structure")
{
    SUBCASE("no jumps: one visit then killed")
    {
        ChainSpec s;
        s.q = Vec::Constant(2, 3.0);
        s.pi = Mat::Zero(2, 2);
        s.mu = Vec::Constant(2, 0.5);
        const DualPair dp = build_dual(s);
        const PathRecord p = sample_path(dp, 1, 17);
        REQUIRE(p.visits.size() == 1);
        CHECK(p.visits[0].state == 1);
        CHECK(p.killed);
        const Vec l = occupation(dp, p);
        CHECK(l(1) == doctest::Approx(p.visits[0].duration / dp.m(1)));
        CHECK(l(0) == 0.0);
    }
    SUBCASE("N-chain visits every state in order")
    {
        const DualPair dp = build_dual(n_chain(5));
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const PathRecord p = sample_path(dp, 0, seed);
            REQUIRE(p.visits.size() == 5);
            for (int i = 0; i < 5; ++i) {
                CHECK(p.visits[static_cast<std::size_t>(i)].state == i);
            }
            const Vec l = occupation(dp, p);
            CHECK(l.sum() == doctest::Approx(p.lifetime()));
        }
    }
    SUBCASE("same seed, same path")
    {
        const DualPair dp = build_dual(random_chain(5, 8));
        const PathRecord a = sample_path(dp, 2, 99), b = sample_path(dp, 2, 99);
        REQUIRE(a.visits.size() == b.visits.size());
        for (std::size_t i = 0; i < a.visits.size(); ++i) {
            CHECK(a.visits[i].state == b.visits[i].state);
            CHECK(a.visits[i].duration == b.visits[i].duration);
        }
    }
}

TEST_CASE("lifetime and occupation means")
{
    const DualPair dp = build_dual(random_chain(4, 12));
    const Mat g = green(dp, ChiMeasure::zero(4));
    for (int x = 0; x < 4; ++x) {
        const Estimate life = lifetime_estimate(dp, x, 100000, 5 + static_cast<std::uint64_t>(x));
        CHECK(std::abs(life.value - dp.V.row(x).sum()) <= 4.0 * life.se);
        const auto occ = occupation_estimate(dp, x, 100000, 50 + static_cast<std::uint64_t>(x));
        for (int y = 0; y < 4; ++y) {
            CHECK(std::abs(occ[static_cast<std::size_t>(y)].value - g(x, y)) <= 4.0 * occ[static_cast<std::size_t>(y)].se);
        }
    }
}

TEST_CASE("bridge contributions")
{
    SUBCASE("single visit, exponential F, closed form against quadrature")
    {
        ChainSpec s;
        s.q = Vec::Ones(1);
        s.pi = Mat::Zero(1, 1);
        s.mu = Vec::Ones(1);
        const DualPair dp = build_dual(s);
        PathRecord p;
        p.visits.push_back({0, 1.3});
        const Vec chi = Vec::Constant(1, 0.7);
        const std::vector<double> shift{0.2};
        const FieldFunctional fe = FieldFunctional::exponential(chi, dp.m);
        const FieldFunctional fg = FieldFunctional::general(fe.eval);
        const double closed = bridge_contribution(dp, p, 0, fe, shift);
        const double quad = bridge_contribution(dp, p, 0, fg, shift);
        // int_0^1.3 exp(-0.7 (0.2 + u)) du
        const double oracle = std::exp(-0.14) * (1.0 - std::exp(-0.7 * 1.3)) / 0.7;
        CHECK(closed == doctest::Approx(oracle).epsilon(1e-13));
        CHECK(quad == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(bridge_contribution(dp, p, 0, FieldFunctional::constant(2.0), shift) == doctest::Approx(2.6));
    }
    SUBCASE("no time at y contributes nothing")
    {
        const DualPair dp = build_dual(n_chain(3));
        PathRecord p;
        p.visits = {{0, 0.5}, {1, 0.7}};
        const std::vector<double> shift(3, 0.0);
        CHECK(bridge_contribution(dp, p, 2, FieldFunctional::constant(1.0), shift) == 0.0);
        CHECK(bridge_contribution(dp, p, 1, FieldFunctional::constant(1.0), shift) == doctest::Approx(0.7));
    }
}

TEST_CASE("bridge estimates against resolvent oracles")
{
    for (std::uint64_t seed : {3u, 4u}) {
        const DualPair dp = build_dual(random_chain(4, seed));
        const Vec chi = random_vector(4, seed, 0.0, 1.5);
        const Mat g0 = green(dp, ChiMeasure::zero(4));
        const Mat gc = green(dp, ChiMeasure(chi));
        const int x = static_cast<int>(seed % 4), y = static_cast<int>((seed + 1) % 4);
        const Estimate mass = bridge_estimate(dp, x, y, FieldFunctional::constant(1.0), 100000, seed);
        CHECK(std::abs(mass.value - g0(x, y)) <= 4.0 * mass.se);
        const Estimate damped = bridge_estimate(dp, x, y, FieldFunctional::exponential(chi, dp.m), 100000, seed + 7);
        CHECK(std::abs(damped.value - gc(x, y)) <= 4.0 * damped.se);
    }
}

TEST_CASE("N-chain diagonal bridge: local time law")
{
    const DualPair dp = build_dual(n_chain(4));
    const int x = 2;
    const Estimate mass = bridge_estimate(dp, x, x, FieldFunctional::constant(1.0), 100000, 1);
    CHECK(std::abs(mass.value - 1.0) <= 4.0 * mass.se);
    double factorial = 1.0;
    for (int k = 1; k <= 3; ++k) {
        factorial *= k;
        const auto power = FieldFunctional::general([x, k](std::span<const double> l) {
            return std::pow(l[static_cast<std::size_t>(x)], k);
        });
        const Estimate e = bridge_estimate(dp, x, x, power, 100000, 10 + static_cast<std::uint64_t>(k));
        CHECK(std::abs(e.value - factorial) <= 4.0 * e.se);
    }
    for (double c : {0.5, 2.0}) {
        Vec chi = Vec::Zero(4);
        chi(x) = c;
        const Estimate e = bridge_estimate(dp, x, x, FieldFunctional::exponential(chi, dp.m), 100000, 3);
        CHECK(std::abs(e.value - 1.0 / (1.0 + c)) <= 4.0 * e.se);
    }
    // Later states carry no local time while the bridge is at x.
    Vec later = Vec::Zero(4);
    later(3) = 5.0;
    const Estimate damped = bridge_estimate(dp, x, x, FieldFunctional::exponential(later, dp.m), 20000, 4);
    const Estimate plain = bridge_estimate(dp, x, x, FieldFunctional::constant(1.0), 20000, 4);
    CHECK(damped.value == doctest::Approx(plain.value).epsilon(1e-14));
}
