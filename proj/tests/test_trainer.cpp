#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "dcrnet/checkpoint.hpp"
#include "dcrnet/synthetic.hpp"
#include "dcrnet/trainer.hpp"
#include "support/tmp_dir.hpp"

using namespace dcrnet;

namespace {

Corpus toy_corpus() {
  Corpus corpus;
  corpus.train = toy_dialogs();
  corpus.dev = corpus.train;
  corpus.test = corpus.train;
  std::vector<std::string> da, sent;
  for (const Dialog& dialog : corpus.train) {
    for (const Utterance& u : dialog.utterances) {
      da.push_back(u.da);
      sent.push_back(u.sentiment);
    }
  }
  corpus.da_labels = LabelMap::over(da);
  corpus.sentiment_labels = LabelMap::over(sent);
  return corpus;
}

ModelConfig toy_config(RelationKind kind) {
  ModelConfig config;
  config.d_emb = 16;
  config.d = 24;
  config.relation = kind;
  config.layers = 1;
  config.dropout = 0.0;
  config.l2 = 1e-8;
  config.lr = 0.01;
  config.epochs = 250;
  config.batch_size = 2;
  config.seed = 7;
  return config;
}

}  // namespace

TEST_CASE("training memorizes the toy corpus with every interaction kind") {
  const Corpus corpus = toy_corpus();
  for (RelationKind kind :
       {RelationKind::Concat, RelationKind::Mlp, RelationKind::CoAttention}) {
    std::string kind_name = to_string(kind);
    CAPTURE(kind_name);
    TrainOutcome outcome = train(toy_config(kind), corpus);

    REQUIRE(outcome.best.epoch >= 1);
    CHECK(outcome.best.dev_da_f1 == doctest::Approx(100.0));
    CHECK(outcome.best.dev_sc_f1 == doctest::Approx(100.0));

    Model model = restore_model(outcome.best);
    Vocabulary vocab = restore_vocab(outcome.best);
    std::vector<EncodedDialog> split = encode_split(
        corpus.train, vocab, corpus.da_labels, corpus.sentiment_labels);
    Rng unused(0);
    std::int64_t correct = 0, total = 0;
    for (const EncodedDialog& dialog : split) {
      Model::Forward out = model.forward(dialog, false, unused);
      for (std::size_t t = 0; t < dialog.utterances.size(); ++t) {
        correct += out.predictions.da_pred[t] == dialog.utterances[t].da &&
                   out.predictions.sent_pred[t] == dialog.utterances[t].sentiment;
        ++total;
      }
    }
    CHECK(correct == total);
  }
}

TEST_CASE("identical seeds reproduce a run byte for byte") {
  const Corpus corpus = toy_corpus();
  ModelConfig config = toy_config(RelationKind::CoAttention);
  config.epochs = 10;
  config.dropout = 0.25;  // mask draws must replay identically

  TrainOutcome a = train(config, corpus);
  TrainOutcome b = train(config, corpus);
  CHECK(a.log_jsonl == b.log_jsonl);
  CHECK(checkpoint_bytes(a.best) == checkpoint_bytes(b.best));
  CHECK(a.log.size() == 10);
  CHECK(a.log.front().selected);
  CHECK(a.log.front().epoch == 1);
  CHECK(a.best.epoch >= 1);

  ModelConfig reseeded = config;
  reseeded.seed = 99;
  TrainOutcome c = train(reseeded, corpus);
  CHECK(c.log_jsonl != a.log_jsonl);
}

TEST_CASE("the training loss trends down on a memorizable corpus") {
  const Corpus corpus = toy_corpus();
  ModelConfig config = toy_config(RelationKind::Mlp);
  config.epochs = 10;

  TrainOutcome outcome = train(config, corpus);
  REQUIRE(outcome.log.size() == 10);
  int regressions = 0;
  for (std::size_t i = 1; i < outcome.log.size(); ++i) {
    regressions += outcome.log[i].train_loss > outcome.log[i - 1].train_loss;
  }
  CHECK(regressions <= 2);
  CHECK(outcome.log.back().train_loss < outcome.log.front().train_loss);
  for (const EpochLog& row : outcome.log) {
    CHECK(std::isfinite(row.train_loss));
    CHECK(row.dev_da_f1 >= 0.0);
    CHECK(row.dev_da_f1 <= 100.0);
    CHECK(row.dev_sc_f1 >= 0.0);
    CHECK(row.dev_sc_f1 <= 100.0);
  }
}

TEST_CASE("a checkpoint survives save, load and restore unchanged") {
  const Corpus corpus = toy_corpus();
  ModelConfig config = toy_config(RelationKind::CoAttention);
  config.epochs = 3;
  TrainOutcome outcome = train(config, corpus);
  const std::string bytes = checkpoint_bytes(outcome.best);

  testing::TmpDir dir("ckpt");
  save_checkpoint(outcome.best, dir.file("model.bin"));
  Checkpoint loaded = load_checkpoint(dir.file("model.bin"));
  CHECK(checkpoint_bytes(loaded) == bytes);

  Model original = restore_model(outcome.best);
  Model reloaded = restore_model(loaded);
  Vocabulary vocab = restore_vocab(loaded);
  std::vector<EncodedDialog> dev = encode_split(
      corpus.dev, vocab, corpus.da_labels, corpus.sentiment_labels);
  Rng r1(0), r2(0);
  Model::Forward f1 = original.forward(dev[0], false, r1);
  Model::Forward f2 = reloaded.forward(dev[0], false, r2);
  CHECK(f1.predictions.da_probs.values() == f2.predictions.da_probs.values());
  CHECK(f1.predictions.sent_probs.values() ==
        f2.predictions.sent_probs.values());

  // The stored dev scores were computed from exactly these parameter values,
  // so re-running the evaluation must reproduce them bit for bit.
  EvalPair eval = evaluate_split(reloaded, dev, corpus.da_labels,
                                 corpus.sentiment_labels);
  CHECK(eval.da.f1 == loaded.dev_da_f1);
  CHECK(eval.sentiment.f1 == loaded.dev_sc_f1);

  AdamState adam = restore_adam(loaded, reloaded);
  CHECK(adam.step == loaded.adam_step);
  Checkpoint recaptured = Checkpoint::capture(
      reloaded, adam, vocab, corpus.da_labels, corpus.sentiment_labels,
      loaded.epoch, loaded.dev_da_f1, loaded.dev_sc_f1);
  CHECK(checkpoint_bytes(recaptured) == bytes);
}

TEST_CASE("checkpoint decoding rejects tampering") {
  ModelConfig config = toy_config(RelationKind::Concat);
  Rng rng(3);
  Model model(config, 9, 3, 3, rng);
  Vocabulary vocab =
      Vocabulary::from_tokens({"a", "b", "c", "d", "e", "f", "g"}, 1);
  LabelMap da = LabelMap::over({"x", "y", "z"});
  LabelMap sent = LabelMap::over({"negative", "neutral", "positive"});
  std::vector<Tensor> params;
  for (const NamedParam& p : model.parameters()) params.push_back(p.tensor);
  AdamState adam = AdamState::init(params);
  Checkpoint ckpt =
      Checkpoint::capture(model, adam, vocab, da, sent, 1, 10.0, 20.0);
  const std::string bytes = checkpoint_bytes(ckpt);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_WITH_AS(checkpoint_from_bytes(bad_magic),
                       "not a checkpoint file (bad magic)",
                       std::runtime_error);

  std::string flipped = bytes;
  flipped[bytes.size() / 2] = char(flipped[bytes.size() / 2] ^ 0x40);
  CHECK_THROWS_WITH_AS(checkpoint_from_bytes(flipped),
                       "checkpoint integrity hash mismatch",
                       std::runtime_error);

  CHECK_THROWS_AS(checkpoint_from_bytes(bytes.substr(0, bytes.size() - 3)),
                  std::runtime_error);

  Checkpoint renamed = ckpt;
  renamed.params[0].name = "unknown.tensor";
  CHECK_THROWS_AS(restore_model(renamed), std::runtime_error);

  Checkpoint misshapen = ckpt;
  misshapen.params[0].rows += 1;
  CHECK_THROWS_AS(restore_model(misshapen), std::runtime_error);
}

TEST_CASE("analytic gradients match central differences end to end") {
  for (RelationKind kind : {RelationKind::Concat, RelationKind::Mlp,
                            RelationKind::CoAttention, RelationKind::None}) {
    std::string kind_name = to_string(kind);
    ModelConfig config;
    config.d_emb = 4;
    config.d = 8;
    config.relation = kind;
    config.layers = 1;
    config.dropout = 0.0;
    config.l2 = 1e-4;
    GradCheckResult result = gradcheck_model(config, 11);
    CAPTURE(kind_name);
    CAPTURE(result.worst_param);
    CAPTURE(result.max_rel_err);
    CHECK(result.passed);
    CHECK(result.checked_values > 0);
  }
}

TEST_CASE("a corrupted gradient is caught and named") {
  ModelConfig config;
  config.d_emb = 4;
  config.d = 8;
  config.relation = RelationKind::CoAttention;
  config.layers = 1;
  config.dropout = 0.0;

  GradCheckResult result = gradcheck_model(config, 11, "decoder.w_da");
  CHECK_FALSE(result.passed);
  CHECK(result.worst_param == "decoder.w_da");
  CHECK(result.max_rel_err > 0.01);

  CHECK_THROWS_AS(gradcheck_model(config, 11, "no.such.tensor"),
                  std::invalid_argument);
}

TEST_CASE("the protocol picks the averaging and exclusion scheme") {
  const Corpus corpus = toy_corpus();
  Vocabulary vocab = Vocabulary::build(corpus.train, 1);
  std::vector<EncodedDialog> dev = encode_split(
      corpus.dev, vocab, corpus.da_labels, corpus.sentiment_labels);
  const auto neutral = corpus.sentiment_labels.neutral_index();
  REQUIRE(neutral.has_value());

  ModelConfig config = toy_config(RelationKind::CoAttention);
  auto fresh_model = [&](const ModelConfig& c) {
    Rng rng(5);
    return Model(c, vocab.size(), corpus.da_labels.size(),
                 corpus.sentiment_labels.size(), rng);
  };

  Model mastodon = fresh_model(config);
  EvalPair mp = evaluate_split(mastodon, dev, corpus.da_labels,
                               corpus.sentiment_labels);
  CHECK(mp.da.task == "dialog_act");
  CHECK(mp.sentiment.task == "sentiment");
  CHECK(mp.da.scheme == "prevalence_weighted");
  CHECK(mp.sentiment.scheme == "macro");
  CHECK(mp.sentiment.per_label[*neutral].excluded);
  CHECK(mp.sentiment.per_label[*neutral].gold_count == 2);
  CHECK(mp.sentiment.per_label[*neutral].label == "neutral");

  ModelConfig daily_config = config;
  daily_config.protocol = Protocol::DailyDialog;
  Model daily = fresh_model(daily_config);
  EvalPair dp =
      evaluate_split(daily, dev, corpus.da_labels, corpus.sentiment_labels);
  CHECK(dp.da.scheme == "macro");
  CHECK(dp.sentiment.scheme == "macro");
  for (const LabelScore& row : dp.sentiment.per_label) {
    CHECK_FALSE(row.excluded);
  }
  // Same seed, same structure: both models predict identically, so the raw
  // confusion counts agree even though the averages differ.
  REQUIRE(dp.da.per_label.size() == mp.da.per_label.size());
  for (std::size_t l = 0; l < dp.da.per_label.size(); ++l) {
    CHECK(dp.da.per_label[l].tp == mp.da.per_label[l].tp);
    CHECK(dp.da.per_label[l].fp == mp.da.per_label[l].fp);
    CHECK(dp.da.per_label[l].fn == mp.da.per_label[l].fn);
  }

  ModelConfig dropping = config;
  dropping.neutral_exclusion = NeutralExclusion::FromData;
  Model dropped = fresh_model(dropping);
  EvalPair fp =
      evaluate_split(dropped, dev, corpus.da_labels, corpus.sentiment_labels);
  CHECK(fp.sentiment.per_label[*neutral].excluded);
  CHECK(fp.sentiment.per_label[*neutral].gold_count == 0);
}

TEST_CASE("training rejects unusable corpora") {
  const Corpus corpus = toy_corpus();
  ModelConfig config = toy_config(RelationKind::CoAttention);
  config.epochs = 1;

  Corpus no_train = corpus;
  no_train.train.clear();
  CHECK_THROWS_WITH_AS(train(config, no_train), "train: empty training split",
                       std::invalid_argument);

  Corpus no_dev = corpus;
  no_dev.dev.clear();
  CHECK_THROWS_AS(train(config, no_dev), std::invalid_argument);

  Corpus unlabeled = corpus;
  unlabeled.train[0].utterances[1].da.clear();
  CHECK_THROWS_AS(train(config, unlabeled), std::invalid_argument);

  ModelConfig zero_epochs = config;
  zero_epochs.epochs = 0;
  CHECK_THROWS_AS(train(zero_epochs, corpus), std::invalid_argument);
}
