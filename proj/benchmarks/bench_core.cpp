#include <benchmark/benchmark.h>

#include <random>

#include "pm/map.hpp"
#include "pm/parallel.hpp"
#include "pm/sampling.hpp"
#include "pm/transfer.hpp"

namespace {

void BM_MapApply(benchmark::State& state) {
  const pm::MapParameter p(static_cast<double>(state.range(0)) / 100.0);
  double x = 0.3;
  for (auto _ : state) {
    x = pm::apply(p, x);
    benchmark::DoNotOptimize(x);
  }
}
// 25/50/75 hit the sqrt fast paths, 30 the generic pow branch.
BENCHMARK(BM_MapApply)->Arg(25)->Arg(30)->Arg(50)->Arg(75);

void BM_BranchInverseLeft(benchmark::State& state) {
  const pm::MapParameter p(0.5);
  double y = 0.0;
  for (auto _ : state) {
    y += 0.37;
    if (y >= 1.0) y -= 1.0;
    benchmark::DoNotOptimize(pm::branch_inverse(p, pm::Branch::left, y));
  }
}
BENCHMARK(BM_BranchInverseLeft);

void BM_UlamBuild(benchmark::State& state) {
  const pm::MapParameter p(0.5);
  const int bins = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto L = pm::ulam_matrix(p, bins);
    benchmark::DoNotOptimize(L.val.data());
  }
}
BENCHMARK(BM_UlamBuild)->Arg(512)->Arg(4096);

void BM_UlamApply(benchmark::State& state) {
  const pm::MapParameter p(0.5);
  const int bins = static_cast<int>(state.range(0));
  const auto L = pm::ulam_matrix(p, bins);
  pm::GridDensity f(bins, 1.0);
  for (auto _ : state) {
    f = L.apply(f);
    benchmark::DoNotOptimize(f.values().data());
  }
}
BENCHMARK(BM_UlamApply)->Arg(512)->Arg(4096);

void BM_OrbitSum(benchmark::State& state) {
  const pm::MapParameter p(0.5);
  std::mt19937_64 rng(7);
  for (auto _ : state) {
    double x = pm::uniform01(rng);
    double acc = 0.0;
    for (int k = 0; k < 128; ++k) {
      acc += x;
      x = pm::apply(p, x);
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_OrbitSum);

}  // namespace

BENCHMARK_MAIN();
