#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dynlab/chain.hpp"
#include "dynlab/harness.hpp"
#include "dynlab/random_models.hpp"
#include "dynlab/report.hpp"
#include "dynlab/twisted.hpp"

using namespace dynlab;

namespace {

bool all_pass(const std::vector<VerificationReport>& rows)
{
    for (const auto& r : rows) {
        if (!r.pass) {
            MESSAGE(r.name << " lhs=" << r.lhs << " rhs=" << r.rhs << " z=" << r.z);
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("report rows")
{
    const auto e = VerificationReport::exact("e", 1.0, 1.0 + 1e-12, 1e-10);
    CHECK(e.pass);
    CHECK_FALSE(VerificationReport::exact("e", 1.0, 1.1, 1e-10).pass);
    const auto m = VerificationReport::mc_against("m", Estimate{1.0, 0.1, 100}, 1.5);
    CHECK(m.z == doctest::Approx(-5.0));
    CHECK_FALSE(m.pass);
    CHECK(VerificationReport::lower_bound("b", Estimate{-0.3, 0.1, 100}, 0.0).pass);
    CHECK_FALSE(VerificationReport::lower_bound("b", Estimate{-0.5, 0.1, 100}, 0.0).pass);
    CHECK(VerificationReport::info("i", 1.0, 2.0).pass);

    std::vector<VerificationReport> rows{e, m};
    CHECK(failure_count(rows) == 1);
    CHECK(exit_code(rows) == 1);
    const std::string csv = to_csv(rows, false);
    CHECK(csv.rfind(std::string(csv_header) + "\n", 0) == 0);
    CHECK(csv.find("FAIL") != std::string::npos);
    CHECK(to_csv(rows, false) == csv);
}

TEST_CASE("Bonferroni threshold never drops below 4")
{
    CHECK(bonferroni_threshold(1) == doctest::Approx(4.0));
    CHECK(bonferroni_threshold(1000000) > 4.0);
    std::vector<VerificationReport> rows;
    for (int i = 0; i < 3; ++i) {
        rows.push_back(VerificationReport::mc_against("m", Estimate{0.0, 1.0, 10}, 3.9));
    }
    apply_bonferroni(rows);
    for (const auto& r : rows) {
        CHECK(r.threshold >= 4.0);
        CHECK(r.pass);
    }
}

TEST_CASE("exact forms of the isomorphism identities")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int n = 2 + static_cast<int>(seed % 5);
        const DualPair dp = build_dual(random_chain(n, seed));
        const ChiMeasure chi(random_vector(n, seed + 1, 0.0, 2.0));
        const int x = static_cast<int>(seed % n), y = static_cast<int>((seed * 3) % n);
        CHECK(verify_star_exact(dp, x, y, chi).pass);
        CHECK(verify_starstar_exact(dp, x, chi).pass);
    }
}

TEST_CASE("Monte Carlo off-diagonal identity on a small chain")
{
    const DualPair dp = build_dual(random_chain(3, 21));
    SUBCASE("F = 1 against the Green density")
    {
        const auto rows = verify_star(dp, 0, 2, FieldFunctional::constant(1.0), 100000, 1);
        CHECK(rows.size() == 3);
        CHECK(all_pass(rows));
    }
    SUBCASE("non-exponential F, two sampled sides")
    {
        const auto f = FieldFunctional::general([](std::span<const double> r) {
            double v = 1.0;
            for (double x : r) {
                v /= 1.0 + x;
            }
            return v;
        });
        const auto rows = verify_star(dp, 1, 0, f, 100000, 2);
        CHECK(rows.size() == 1);
        CHECK(all_pass(rows));
    }
}

TEST_CASE("positivity suite on a random chain")
{
    const DualPair dp = build_dual(random_chain(3, 5));
    const auto rows = verify_positivity(dp, 100000, 3);
    CHECK(rows.size() > 10);
    CHECK(all_pass(rows));
}

TEST_CASE("trace reports")
{
    const DualPair nc = build_dual(n_chain(4));
    const std::vector<int> y{0, 3};
    std::vector<std::vector<int>> tuples{{0, 3}};
    CHECK(verify_trace(nc, y, tuples).pass);
    CHECK(q_moment(nc, tuples[0]) == doctest::Approx(1.0));
    const DualPair dp = build_dual(random_chain(6, 13));
    const std::vector<int> sub{1, 2, 4};
    CHECK(trace_potential_report(dp, sub).pass);
    const auto pairs = pair_tuples(sub);
    CHECK(pairs.size() == 3 + 9);
    CHECK(verify_trace(dp, sub, pairs).pass);
}

TEST_CASE("N-chain worked example")
{
    CHECK(n_chain_mass_gap(1) == doctest::Approx(1.0));
    CHECK(n_chain_mass_gap_printed(1) == doctest::Approx(2.0));
    CHECK(n_chain_mass_gap(3) == doctest::Approx(1.0 - std::cos(std::numbers::pi / 4.0)));
    SUBCASE("N = 1")
    {
        CHECK(all_pass(example_suite(1, 20000, 1)));
    }
    SUBCASE("N = 5")
    {
        CHECK(all_pass(example_suite(5, 100000, 1)));
    }
}
