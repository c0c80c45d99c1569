// Serial reference kernels against the OpenMP paths. Both draw the same
// directions, so timings compare equal work.

#include "slicematch/experiment.hpp"
#include "slicematch/gaussianflow.hpp"
#include "slicematch/reference.hpp"
#include "slicematch/scheme.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

namespace {

using namespace slicematch;

struct Clouds {
  ParticleCloud src;
  ParticleCloud tgt;
};

Clouds make_clouds(Index d, Index n) {
  RngStream rng(42, 0);
  ParticleCloud src = init_gaussian_mixture_cloud(d, n, rng);
  ParticleCloud tgt = init_gaussian_mixture_cloud(d, n, rng);
  return {std::move(src), std::move(tgt)};
}

void BM_Sw2sqSerial(benchmark::State& state) {
  const auto c = make_clouds(state.range(0), state.range(1));
  const RngStream rng(7, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::sw2sq_mc(c.src, c.tgt, 256, rng).value);
}

void BM_Sw2sqParallel(benchmark::State& state) {
  const auto c = make_clouds(state.range(0), state.range(1));
  const RngStream rng(7, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sw2sq_mc(c.src, c.tgt, 256, rng).value);
  state.counters["threads"] = omp_get_max_threads();
}

void gaussian_pair(Index d, Matrix& sigma, Matrix& lambda) {
  RngStream rng(42, 1);
  sigma = random_spd(d, 0.1, 10.0, rng);
  lambda = random_spd(d, 0.1, 10.0, rng);
}

void BM_GaussianSw2sqSerial(benchmark::State& state) {
  Matrix sigma, lambda;
  gaussian_pair(state.range(0), sigma, lambda);
  const RngStream rng(7, 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::sw2sq_gaussian_mc(sigma, lambda, 100000, rng).value);
}

void BM_GaussianSw2sqParallel(benchmark::State& state) {
  Matrix sigma, lambda;
  gaussian_pair(state.range(0), sigma, lambda);
  const RngStream rng(7, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sw2sq_gaussian_mc(sigma, lambda, 100000, rng).value);
  state.counters["threads"] = omp_get_max_threads();
}

void BM_SliceMapBasisSerial(benchmark::State& state) {
  const auto c = make_clouds(state.range(0), state.range(1));
  RngStream rng(7, 3);
  const OrthoBasis basis = sample_haar_basis(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(reference::slice_map_basis(c.src, c.tgt, basis).points().data());
}

void BM_SliceMapBasisParallel(benchmark::State& state) {
  const auto c = make_clouds(state.range(0), state.range(1));
  RngStream rng(7, 3);
  const OrthoBasis basis = sample_haar_basis(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(slice_map_basis(c.src, c.tgt, basis).points().data());
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_Sw2sqSerial)->Args({5, 500})->Args({10, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sw2sqParallel)->Args({5, 500})->Args({10, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianSw2sqSerial)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianSw2sqParallel)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SliceMapBasisSerial)->Args({5, 500})->Args({20, 10000})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SliceMapBasisParallel)->Args({5, 500})->Args({20, 10000})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
