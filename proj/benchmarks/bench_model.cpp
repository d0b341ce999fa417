#include <benchmark/benchmark.h>

#include "dcrnet/decoder.hpp"
#include "dcrnet/model.hpp"

using namespace dcrnet;

namespace {

constexpr std::int64_t kVocab = 800;

EncodedDialog synthetic_dialog(std::int64_t utterances, std::int64_t tokens,
                               Rng& rng) {
  EncodedDialog dialog;
  dialog.id = "bench";
  for (std::int64_t t = 0; t < utterances; ++t) {
    EncodedUtterance u;
    for (std::int64_t k = 0; k < tokens; ++k) {
      u.token_ids.push_back(
          static_cast<std::int64_t>(rng.below(kVocab - 2)) + 2);
    }
    u.da = static_cast<std::int64_t>(rng.below(7));
    u.sentiment = static_cast<std::int64_t>(rng.below(3));
    dialog.utterances.push_back(std::move(u));
  }
  return dialog;
}

ModelConfig bench_config(RelationKind kind, std::int64_t d) {
  ModelConfig config;
  config.d_emb = 64;
  config.d = d;
  config.relation = kind;
  config.layers = kind == RelationKind::None ? 1 : 2;
  config.dropout = 0.25;
  return config;
}

void run_forward(benchmark::State& state, RelationKind kind) {
  const std::int64_t d = state.range(0);
  ModelConfig config = bench_config(kind, d);
  Rng rng(1);
  Model model(config, kVocab, 7, 3, rng);
  EncodedDialog dialog = synthetic_dialog(8, 12, rng);
  Rng eval_rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(dialog, false, eval_rng));
  }
}

void bm_forward_coattention(benchmark::State& state) {
  run_forward(state, RelationKind::CoAttention);
}
void bm_forward_mlp(benchmark::State& state) {
  run_forward(state, RelationKind::Mlp);
}
void bm_forward_none(benchmark::State& state) {
  run_forward(state, RelationKind::None);
}

void bm_train_step(benchmark::State& state) {
  const std::int64_t d = state.range(0);
  ModelConfig config = bench_config(RelationKind::CoAttention, d);
  Rng rng(3);
  Model model(config, kVocab, 7, 3, rng);
  EncodedDialog dialog = synthetic_dialog(8, 12, rng);
  std::vector<std::int64_t> gold_da, gold_sent;
  for (const EncodedUtterance& u : dialog.utterances) {
    gold_da.push_back(u.da);
    gold_sent.push_back(u.sentiment);
  }
  std::vector<Tensor> params;
  for (const NamedParam& p : model.parameters()) params.push_back(p.tensor);
  Rng train_rng(4);
  for (auto _ : state) {
    Model::Forward out = model.forward(dialog, true, train_rng);
    Tensor loss = joint_loss(out.predictions, gold_da, gold_sent);
    GradRecord record = backward(loss);
    benchmark::DoNotOptimize(record.grad(params.front()));
  }
}

}  // namespace

BENCHMARK(bm_forward_coattention)->Arg(64)->Arg(128);
BENCHMARK(bm_forward_mlp)->Arg(64)->Arg(128);
BENCHMARK(bm_forward_none)->Arg(64)->Arg(128);
BENCHMARK(bm_train_step)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
