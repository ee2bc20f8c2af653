#include <benchmark/benchmark.h>

#include "rgg/calibration.hpp"
#include "rgg/signed_stats.hpp"
#include "rgg/spectral.hpp"
#include "rgg/torus_model.hpp"
#include "rgg/trace_core.hpp"

using namespace rgg;

namespace {

ModelConfig config(std::size_t n, std::size_t d, Norm norm) {
  ModelConfig c;
  c.n = n;
  c.d = d;
  c.p = 0.5;
  c.norm = norm;
  c.master_seed = 1;
  return c;
}

double tau_for(const ModelConfig& c) {
  LqCalibrationOptions o;
  o.sample_budget = 100'000;
  o.validation_budget = 0;
  return calibrate(c, o).tau;
}

}  // namespace

static void BM_SampleRgg(benchmark::State& state) {
  const auto c = config(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), Norm::lq(2));
  const double tau = tau_for(c);
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_rgg(c, tau, stream++));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}
BENCHMARK(BM_SampleRgg)->Args({500, 16})->Args({500, 1024})->Args({2000, 16})->Unit(benchmark::kMillisecond);

static void BM_SampleRggLinf(benchmark::State& state) {
  const auto c = config(static_cast<std::size_t>(state.range(0)), 64, Norm::infinity());
  const double tau = calibrate(c).tau;
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_rgg(c, tau, stream++));
}
BENCHMARK(BM_SampleRggLinf)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_PairDistances(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_pair_distances(2, static_cast<std::size_t>(state.range(0)), 100'000, 1, 0));
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_PairDistances)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_SignedTriangles(benchmark::State& state) {
  const auto g = sample_gnp(static_cast<std::size_t>(state.range(0)), 0.5, 2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(signed_triangle_count(g, 0.5));
}
BENCHMARK(BM_SignedTriangles)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Spectrum(benchmark::State& state) {
  const auto m = center_adjacency(sample_gnp(static_cast<std::size_t>(state.range(0)), 0.5, 3, 0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(m));
}
BENCHMARK(BM_Spectrum)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_TracePower(benchmark::State& state) {
  const auto m = center_adjacency(sample_gnp(1000, 0.5, 4, 0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(trace_power(m, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TracePower)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_ContractCore(benchmark::State& state) {
  std::vector<int> walk;
  for (int j = 0; j < 16; ++j) walk.push_back((j * 7) % 11);
  walk.push_back(walk.front());
  const auto h = walk_to_multigraph(walk);
  for (auto _ : state) benchmark::DoNotOptimize(contract_core(h));
}
BENCHMARK(BM_ContractCore);
BENCHMARK_MAIN();
