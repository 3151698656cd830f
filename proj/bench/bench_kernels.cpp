#include <benchmark/benchmark.h>

#include "dynlab/chain.hpp"
#include "dynlab/hilbert.hpp"
#include "dynlab/paths.hpp"
#include "dynlab/permanent.hpp"
#include "dynlab/random_models.hpp"
#include "dynlab/twisted.hpp"

using namespace dynlab;

namespace {

Exec exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void label(benchmark::State& state)
{
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_bridge(benchmark::State& state)
{
    const DualPair dp = build_dual(random_chain(6, 1));
    const auto f = FieldFunctional::exponential(random_vector(6, 2, 0.0, 1.0), dp.m);
    const auto count = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bridge_estimate(dp, 0, 3, f, count, 7, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
    label(state);
}

void BM_twisted(benchmark::State& state)
{
    const TwistedModel tm = TwistedModel::make(build_dual(random_chain(8, 3)));
    const auto count = static_cast<std::size_t>(state.range(1));
    auto f = [](const CVec& z, Rng&, std::span<Complex> out) { out[0] = z(0) * std::conj(z(7)); };
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_twisted(tm, 1, f, count, 11, exec_of(state)).ratio(0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
    label(state);
}

void BM_permanent(benchmark::State& state)
{
    const Mat a = random_matrix(static_cast<int>(state.range(1)), 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(permanent(a, exec_of(state)));
    }
    label(state);
}

void BM_gaussian_identities(benchmark::State& state)
{
    const TruncatedOperator c(random_psd(8, 1, 0.5), OperatorKind::symmetric_nonneg);
    const TruncatedOperator b(random_skew(8, 2, 0.5), OperatorKind::skew);
    const Vec f1 = random_vector(8, 3), f2 = random_vector(8, 4);
    const auto count = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_char_identities(c, b, f1, f2, count, 9, 4.0, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
    label(state);
}

}  // namespace

BENCHMARK(BM_bridge)->ArgsProduct({{0, 1}, {100000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_twisted)->ArgsProduct({{0, 1}, {100000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_permanent)->ArgsProduct({{0, 1}, {10, 14}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gaussian_identities)->ArgsProduct({{0, 1}, {100000}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
