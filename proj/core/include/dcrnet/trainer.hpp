#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcrnet/checkpoint.hpp"
#include "dcrnet/config.hpp"
#include "dcrnet/corpus.hpp"
#include "dcrnet/metrics.hpp"
#include "dcrnet/model.hpp"

namespace dcrnet {

struct EvalPair {
  EvalReport da;
  EvalReport sentiment;
};

// Runs the model over a split and scores both tasks under the configured
// protocol: dailydialog uses macro averages for both; mastodon uses
// prevalence-weighted scores for dialog acts and a macro sentiment average
// with the neutral label excluded (from the average, or from the data
// entirely, per config.neutral_exclusion).
EvalPair evaluate_split(const Model& model,
                        const std::vector<EncodedDialog>& split,
                        const LabelMap& da_labels,
                        const LabelMap& sentiment_labels);

struct EpochLog {
  std::int64_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_da_f1 = 0.0;
  double dev_sc_f1 = 0.0;
  bool selected = false;  // became the new best on the dev selection metric
};

struct TrainOutcome {
  Checkpoint best;
  std::vector<EpochLog> log;
  std::string log_jsonl;  // one JSON object per epoch, byte-deterministic
};

// Full training run: builds the vocabulary from the train split, optimizes
// the joint objective with Adam (mean dialog loss per batch plus L2), and
// keeps the checkpoint of the epoch with the best dev selection metric
// (config.selection: mean | da | sentiment; ties keep the earlier epoch).
TrainOutcome train(const ModelConfig& config, const Corpus& corpus);

struct GradCheckResult {
  bool passed = false;
  double max_rel_err = 0.0;
  std::string worst_param;
  std::int64_t checked_values = 0;
};

// Central-difference check of every analytic gradient on a tiny fixed
// dialog. corrupt_param names a tensor whose analytic gradient is
// deliberately offset, as a negative control; the check must then fail and
// name that tensor.
GradCheckResult gradcheck_model(const ModelConfig& config, std::uint64_t seed,
                                const std::string& corrupt_param = "");

}  // namespace dcrnet
