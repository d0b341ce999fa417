#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcrnet/adam.hpp"
#include "dcrnet/config.hpp"
#include "dcrnet/corpus.hpp"
#include "dcrnet/model.hpp"

namespace dcrnet {

// A training snapshot: configuration, vocabulary, label maps, every
// parameter's values, and the optimizer moments, all by value so the live
// model can keep training after the snapshot is taken.
struct Checkpoint {
  ModelConfig config;
  std::vector<std::string> vocab_tokens;  // index order, reserved rows first
  std::vector<std::string> da_labels;
  std::vector<std::string> sentiment_labels;
  std::int64_t epoch = -1;  // 1-based best epoch, -1 before any selection
  double dev_da_f1 = 0.0;
  double dev_sc_f1 = 0.0;

  struct ParamBlob {
    std::string name;
    std::int64_t rows = 0, cols = 0;
    std::vector<double> values;
  };
  std::vector<ParamBlob> params;

  std::int64_t adam_step = 0;
  std::vector<std::vector<double>> adam_m;  // aligned with params
  std::vector<std::vector<double>> adam_v;

  static Checkpoint capture(const Model& model, const AdamState& optimizer,
                            const Vocabulary& vocab, const LabelMap& da,
                            const LabelMap& sentiment, std::int64_t epoch,
                            double dev_da_f1, double dev_sc_f1);
};

// Versioned little-endian binary image with magic "DCRN1" and a trailing
// integrity hash; decoding rejects bad magic, version, or hash.
std::string checkpoint_bytes(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_bytes(const std::string& bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds the model (and optionally the optimizer moments) from a snapshot;
// every stored tensor must match the freshly constructed shape.
Model restore_model(const Checkpoint& checkpoint);
AdamState restore_adam(const Checkpoint& checkpoint, const Model& model);

// Rebuilds the token mapping; the stored list starts with the reserved
// <pad>/<unk> rows, which from_tokens adds back itself.
Vocabulary restore_vocab(const Checkpoint& checkpoint);

}  // namespace dcrnet
