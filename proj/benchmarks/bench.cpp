#include <benchmark/benchmark.h>

#include "ordcalc/ordinal.hpp"

using namespace ordcalc;

static void bm_parse(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(parse_ordinal("w^(w*2 + 1)*7 + w^(3)*12 + w + 9"));
}
BENCHMARK(bm_parse);

static void bm_add(benchmark::State& state) {
    Ordinal a = parse_ordinal("w^(w)*3 + w^(2)*5 + 1");
    Ordinal b = parse_ordinal("w^(2)*2 + w*4");
    for (auto _ : state) benchmark::DoNotOptimize(a + b);
}
BENCHMARK(bm_add);

static void bm_mul(benchmark::State& state) {
    Ordinal a = parse_ordinal("w^(w) + w^(2)*3");
    Ordinal b = parse_ordinal("w^(3)*2 + w + 5");
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(bm_mul);

static void bm_least_satisfying(benchmark::State& state) {
    Ordinal target = parse_ordinal("w^(3)*4 + w*17 + 2");
    Ordinal hi = parse_ordinal("w^(w)");
    for (auto _ : state)
        benchmark::DoNotOptimize(
            least_satisfying([&](const Ordinal& x) { return x >= target; }, hi));
}
BENCHMARK(bm_least_satisfying);

BENCHMARK_MAIN();
