#include <benchmark/benchmark.h>
#include <omp.h>

#include "chords/bucket.hpp"
#include "chords/gf.hpp"

using namespace chords;

namespace {

Family family_of(int tag) {
    switch (tag) {
        case 0: return Family::matching();
        case 1: return Family::partition();
        default: return Family::diagram();
    }
}

// args: family tag, n
void BM_BucketReference(benchmark::State& state) {
    Family f = family_of(static_cast<int>(state.range(0)));
    int n = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(bucket_reference(f, n));
    state.SetLabel(f.str());
}

// args: family tag, n, threads
void BM_BucketParallel(benchmark::State& state) {
    Family f = family_of(static_cast<int>(state.range(0)));
    int n = static_cast<int>(state.range(1));
    omp_set_num_threads(static_cast<int>(state.range(2)));
    for (auto _ : state) benchmark::DoNotOptimize(bucket_parallel(f, n));
    state.SetLabel(f.str());
}

void BM_ConnectedTable(benchmark::State& state) {
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(connected_table(Family::matching(), static_cast<int>(state.range(0))));
}

void BM_SeriesFromCorePolynomial(benchmark::State& state) {
    const CorePolynomial& core = cached_core_polynomial(Family::matching(), static_cast<int>(state.range(0)));
    SubstitutionRules rules = SubstitutionRules::defaults(Family::matching());
    for (auto _ : state) benchmark::DoNotOptimize(gf_k_from_core_poly(core, rules, static_cast<int>(state.range(1))));
}

const int hw = omp_get_max_threads();

}  // namespace

BENCHMARK(BM_BucketReference)->Args({0, 12})->Args({1, 10})->Args({2, 6})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BucketParallel)
    ->Args({0, 12, 1})
    ->Args({0, 12, hw})
    ->Args({1, 10, 1})
    ->Args({1, 10, hw})
    ->Args({2, 6, 1})
    ->Args({2, 6, hw})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConnectedTable)->Args({6, 1})->Args({6, hw})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeriesFromCorePolynomial)->Args({3, 40})->Args({4, 40})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
