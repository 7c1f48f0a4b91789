#include <benchmark/benchmark.h>

#include "ewl/certificate.hpp"
#include "ewl/families.hpp"
#include "ewl/haar.hpp"
#include "ewl/rng.hpp"
#include "ewl/testing.hpp"

namespace {

using namespace ewl;

LeafMeasure random_measure(const Grid& g, Rng& rng) {
  std::vector<double> m(g.leaf_count());
  for (double& x : m) x = g.leaf_volume() * rng.unit_open_low();
  return LeafMeasure(g, m);
}

LeafFunction random_function(const Grid& g, Rng& rng) {
  LeafFunction f(g);
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = rng.uniform(-1, 1);
  return f;
}

DyadicOperator sample(int n, int d, int r) {
  const Grid g(GridSpec{n, d});
  Rng rng(17);
  const LeafMeasure s = random_measure(g, rng), w = random_measure(g, rng);
  return random_ewl(s, w, {r, rng.bits(), 0});
}

void BM_HaarAnalyze(benchmark::State& state) {
  const Grid g(GridSpec{1, static_cast<int>(state.range(0))});
  Rng rng(1);
  const HaarBasis basis(random_measure(g, rng));
  const LeafFunction f = random_function(g, rng);
  std::vector<double> coeffs(g.leaf_count());
  for (auto _ : state) {
    basis.analyze(f.values().data(), coeffs.data());
    benchmark::DoNotOptimize(coeffs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.leaf_count()));
}
BENCHMARK(BM_HaarAnalyze)->DenseRange(6, 12, 2);

void BM_MartingaleRoundTrip(benchmark::State& state) {
  const Grid g(GridSpec{2, static_cast<int>(state.range(0))});
  Rng rng(2);
  const LeafMeasure mu = random_measure(g, rng);
  const LeafFunction f = random_function(g, rng);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(martingale_decompose(f, mu), mu));
}
BENCHMARK(BM_MartingaleRoundTrip)->DenseRange(2, 5);

void BM_NormDense(benchmark::State& state) {
  const DyadicOperator t = sample(1, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(t, NormMethod::dense));
}
BENCHMARK(BM_NormDense)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

void BM_NormPower(benchmark::State& state) {
  const DyadicOperator t = sample(1, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(t, NormMethod::power));
}
BENCHMARK(BM_NormPower)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

void BM_TestingReport(benchmark::State& state) {
  const DyadicOperator t = sample(1, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(testing_report(t, 1));
}
BENCHMARK(BM_TestingReport)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DyadicOperator t = sample(n, static_cast<int>(state.range(1)), 1);
  Rng rng(3);
  const LeafFunction f = random_function(t.grid(), rng), g = random_function(t.grid(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(full_certificate(t, f, g, 1));
}
BENCHMARK(BM_Certificate)->Args({1, 4})->Args({1, 6})->Args({1, 8})->Args({2, 3})->Args({2, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
