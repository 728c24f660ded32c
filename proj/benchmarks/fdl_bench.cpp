#include <benchmark/benchmark.h>

#include "fdl/backbone.hpp"
#include "fdl/eval.hpp"
#include "fdl/linalg.hpp"
#include "fdl/losses.hpp"
#include "fdl/random.hpp"
#include "fdl/scatter.hpp"

namespace {

using namespace fdl;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(32, 256);

void BM_TripletScatters(benchmark::State& state) {
  const EmbeddedTripletBatch batch{random_matrix(300, 32, 1), random_matrix(300, 32, 2),
                                   random_matrix(300, 32, 3)};
  for (auto _ : state) benchmark::DoNotOptimize(triplet_scatters(batch));
}
BENCHMARK(BM_TripletScatters);

void BM_FdtLoss(benchmark::State& state) {
  const EmbeddedTripletBatch batch{random_matrix(300, 32, 1), random_matrix(300, 32, 2),
                                   random_matrix(300, 32, 3)};
  const Matrix u = random_matrix(300, 128, 4);
  const LossConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fdt_loss(batch, u, cfg));
}
BENCHMARK(BM_FdtLoss);

void BM_FdcLoss(benchmark::State& state) {
  EmbeddedPairBatch batch{random_matrix(300, 32, 1), random_matrix(300, 32, 2), PairLabels(32)};
  for (std::size_t i = 0; i < 32; ++i) batch.y[i] = static_cast<std::uint8_t>(i % 2);
  const Matrix u = random_matrix(300, 128, 4);
  const LossConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fdc_loss(batch, u, cfg));
}
BENCHMARK(BM_FdcLoss);

void BM_TripletLoss(benchmark::State& state) {
  const Matrix a = random_matrix(128, 32, 1);
  const Matrix n = random_matrix(128, 32, 2);
  const Matrix d = random_matrix(128, 32, 3);
  for (auto _ : state) benchmark::DoNotOptimize(triplet_loss(a, n, d, 0.25));
}
BENCHMARK(BM_TripletLoss);

void BM_SymEig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 5);
  const Matrix s = matmul_nt(a, a);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(s));
}
BENCHMARK(BM_SymEig)->Arg(8)->Arg(32)->Arg(64);

void BM_ForwardBackward(benchmark::State& state) {
  const NetworkParams params = init_params({{784, 512, 300}, 128}, 1);
  Matrix x = random_matrix(784, 96, 6);
  for (double& v : x.values()) v = 0.5 * (v + 1.0);
  const Matrix grad = random_matrix(300, 96, 7);
  const Matrix grad_u(300, 128);
  for (auto _ : state) {
    const ForwardTrace trace = forward(params, x);
    benchmark::DoNotOptimize(backward(params, trace, grad, grad_u));
  }
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMillisecond);

void BM_OneNearestNeighbor(benchmark::State& state) {
  const Matrix ref = random_matrix(128, 2000, 8);
  const Matrix query = random_matrix(128, 1000, 9);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_neighbors(ref, query));
}
BENCHMARK(BM_OneNearestNeighbor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
