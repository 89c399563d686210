#include "chipfire/algebra.hpp"
#include "chipfire/divisible.hpp"
#include "chipfire/rotor.hpp"
#include "chipfire/sandpile.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_DivisibleStabilize(benchmark::State& state) {
    double m = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto [st, rep] = chipfire::point_source(m, 2);
        benchmark::DoNotOptimize(rep.sweeps);
    }
}
BENCHMARK(BM_DivisibleStabilize)->Arg(500)->Arg(2000)->Arg(8000);

void BM_RotorAggregate(benchmark::State& state) {
    std::int64_t n = state.range(0);
    for (auto _ : state) {
        auto agg = chipfire::aggregate(n, chipfire::default_rotors(2));
        benchmark::DoNotOptimize(agg.occupied.count);
    }
}
BENCHMARK(BM_RotorAggregate)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_SandpileStabilize(benchmark::State& state) {
    std::int64_t n = state.range(0);
    for (auto _ : state) {
        auto st = chipfire::stabilize_chips(n, 0, 2);
        benchmark::DoNotOptimize(st.visited.count);
    }
}
BENCHMARK(BM_SandpileStabilize)->Arg(1000)->Arg(10000);

void BM_SmithNormalForm(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    auto L = chipfire::reduced_laplacian(chipfire::make_regular_tree(3, n));
    for (auto _ : state) {
        auto dec = chipfire::smith_normal_form(L);
        benchmark::DoNotOptimize(dec.order);
    }
}
BENCHMARK(BM_SmithNormalForm)->Arg(5)->Arg(7)->Arg(9);

}  // namespace

BENCHMARK_MAIN();
