#include <benchmark/benchmark.h>

#include "superrad/batch.hpp"
#include "superrad/energy.hpp"
#include "superrad/scenarios.hpp"

using namespace superrad;

namespace {

void BM_Hamiltonian(benchmark::State& st) {
  const auto M = MetricModel::kerr(1, 0.8);
  const SpatialPoint p{2.0, 0.0, 0.1};
  const Covector xi{0.5, 0.3, 0.8, 0.1};
  for (auto _ : st) benchmark::DoNotOptimize(grad_H(M, p, xi));
}
BENCHMARK(BM_Hamiltonian);

void BM_IntegrateKerr(benchmark::State& st) {
  const auto M = MetricModel::kerr(1, 0.8);
  const auto d = kerr_corotating_data(1, 0.8, 2.0);
  StopSpec s;
  s.precision = st.range(0) ? Precision::Quad : Precision::Double;
  const auto x = init_state(M, d.y0, d.eta, Branch::Minus);
  for (auto _ : st) benchmark::DoNotOptimize(integrate(x, M, Direction::Forward, s));
}
BENCHMARK(BM_IntegrateKerr)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

std::vector<BatchItem> batch_items() {
  const auto M = MetricModel::kerr(1, 0.8);
  std::vector<BatchItem> items;
  for (int i = 0; i < 32; ++i) {
    const auto d = kerr_corotating_data(1, 0.8, 1.8 + 0.01 * i, 0.001 * i);
    items.push_back({init_state(M, d.y0, d.eta, i % 2 ? Branch::Plus : Branch::Minus), M, Direction::Forward, {}});
  }
  return items;
}

void BM_BatchParallel(benchmark::State& st) {
  const auto items = batch_items();
  for (auto _ : st) benchmark::DoNotOptimize(integrate_batch(items));
}
BENCHMARK(BM_BatchParallel)->Unit(benchmark::kMillisecond);

void BM_BatchSerial(benchmark::State& st) {
  const auto items = batch_items();
  for (auto _ : st) benchmark::DoNotOptimize(integrate_batch_serial(items));
}
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);

void BM_Energy(benchmark::State& st) {
  const auto M = MetricModel::kerr(1, 0.8);
  const auto d = kerr_corotating_data(1, 0.8, 2.0);
  QuadratureSpec q;
  q.parallel = st.range(0) != 0;
  const auto b = default_bump(M, d.y0);
  for (auto _ : st) benchmark::DoNotOptimize(superradiance_report(M, b, d.eta, q));
}
BENCHMARK(BM_Energy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
