#include <benchmark/benchmark.h>

#include <vector>

#include "confheat/assignment.hpp"
#include "confheat/harmonic.hpp"
#include "confheat/metrics.hpp"
#include "confheat/points.hpp"
#include "confheat/rng.hpp"

namespace {

using namespace confheat;

std::vector<double> random_matrix(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0, 0, StreamTag::kAuxiliary);
  std::vector<double> m(n * n);
  for (double& v : m) v = rng.uniform();
  return m;
}

points::Configuration random_configuration(int dim, std::size_t n, std::uint32_t salt) {
  RandomStream rng(7, salt, 0, StreamTag::kAuxiliary);
  PointSet ps(dim);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = 4.0 * rng.uniform() - 2.0;
    ps.push_back(x);
  }
  return points::from_particles(ps, 0.0);
}

void BM_Permanent(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_matrix(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(harmonic::permanent(m, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Permanent)->DenseRange(8, 20, 4);

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_matrix(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(assignment::solve(m, n).cost);
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(8, 256);

void BM_Rho(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_configuration(2, n, 1), b = random_configuration(2, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::rho(a, b));
}
BENCHMARK(BM_Rho)->RangeMultiplier(2)->Range(8, 128);

void BM_FlatMetric(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_configuration(2, n, 3), b = random_configuration(2, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::flat_metric(a, b, 3));
}
BENCHMARK(BM_FlatMetric)->DenseRange(4, 16, 4);

void BM_Diffuse(benchmark::State& state) {
  const auto gamma = random_configuration(2, static_cast<std::size_t>(state.range(0)), 5);
  std::uint32_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(points::diffuse(gamma, 0.5, 11, r++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Diffuse)->RangeMultiplier(4)->Range(16, 4096);

void BM_CorrelationInclusionExclusion(benchmark::State& state) {
  const auto gamma = random_configuration(2, 64, 6);
  const PointSet theta = random_configuration(2, static_cast<std::size_t>(state.range(0)), 7).particles();
  for (auto _ : state) benchmark::DoNotOptimize(harmonic::correlation_function_inclusion_exclusion(gamma, theta, 0.3));
}
BENCHMARK(BM_CorrelationInclusionExclusion)->DenseRange(2, 10, 2);

}  // namespace

BENCHMARK_MAIN();
