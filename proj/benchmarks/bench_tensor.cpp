#include <benchmark/benchmark.h>

#include "dcrnet/encoder.hpp"
#include "dcrnet/rng.hpp"
#include "dcrnet/tensor.hpp"

using namespace dcrnet;

namespace {

Tensor random_matrix(std::int64_t rows, std::int64_t cols, Rng& rng,
                     bool requires_grad = false) {
  std::vector<double> values(static_cast<std::size_t>(rows * cols));
  for (double& v : values) v = rng.uniform(-1.0, 1.0);
  return Tensor::of(rows, cols, std::move(values), requires_grad);
}

void bm_matmul(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  Rng rng(1);
  Tensor a = random_matrix(n, n, rng);
  Tensor b = random_matrix(n, n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul(a, b));
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

void bm_matmul_backward(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  Rng rng(2);
  Tensor a = random_matrix(n, n, rng, true);
  Tensor b = random_matrix(n, n, rng, true);
  for (auto _ : state) {
    Tensor loss = sum_all(matmul(a, b));
    GradRecord record = backward(loss);
    benchmark::DoNotOptimize(record.grad(a));
  }
}

void bm_softmax_rows(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  Rng rng(3);
  Tensor x = random_matrix(n, n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(softmax_rows(x));
  }
}

void bm_lstm_sequence(benchmark::State& state) {
  const std::int64_t steps = state.range(0);
  const std::int64_t d_in = 64, d_out = 64;
  Rng rng(4);
  BiLstmParams params = BiLstmParams::init(d_in, d_out, rng);
  Tensor x = random_matrix(steps, d_in, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bilstm_run(x, params));
  }
}

void bm_graph_roundtrip(benchmark::State& state) {
  // forward + backward through a small mixed graph, the per-utterance
  // workload shape that dominates training
  const std::int64_t n = state.range(0);
  Rng rng(5);
  Tensor w1 = random_matrix(n, n, rng, true);
  Tensor w2 = random_matrix(n, n, rng, true);
  Tensor x = random_matrix(8, n, rng);
  for (auto _ : state) {
    Tensor h = tanh(matmul(x, w1));
    Tensor y = softmax_rows(matmul(h, w2));
    Tensor loss = sum_all(mul(y, y));
    GradRecord record = backward(loss);
    benchmark::DoNotOptimize(record.grad(w1));
  }
}

}  // namespace

BENCHMARK(bm_matmul)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_matmul_backward)->Arg(32)->Arg(64);
BENCHMARK(bm_softmax_rows)->Arg(64)->Arg(256);
BENCHMARK(bm_lstm_sequence)->Arg(8)->Arg(32);
BENCHMARK(bm_graph_roundtrip)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
