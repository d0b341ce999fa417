#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcrnet/config.hpp"
#include "dcrnet/corpus.hpp"
#include "dcrnet/decoder.hpp"
#include "dcrnet/encoder.hpp"
#include "dcrnet/relation.hpp"

namespace dcrnet {

struct NamedParam {
  std::string name;
  Tensor tensor;
};

// Full pipeline: dialog encoder -> interaction stack -> two softmax heads.
class Model {
 public:
  Model(const ModelConfig& config, std::int64_t vocab_size, std::int64_t n_da,
        std::int64_t n_sent, Rng& rng);

  struct Forward {
    DialogEncoding encoding;
    StackResult stacked;
    PredictionBatch predictions;
  };

  Forward forward(const EncodedDialog& dialog, bool training, Rng& rng) const;

  // Every trainable tensor in a stable order, tied copies listed once,
  // undefined (variant-unused) slots skipped.
  std::vector<NamedParam> parameters() const;
  std::int64_t parameter_count() const;

  const ModelConfig& config() const { return config_; }
  std::int64_t vocab_size() const { return encoder_.embeddings.rows(); }
  std::int64_t n_da() const { return decoder_.w_da.cols(); }
  std::int64_t n_sent() const { return decoder_.w_sent.cols(); }

  EncoderParams& encoder() { return encoder_; }
  const EncoderParams& encoder() const { return encoder_; }
  std::vector<RelationLayerParams>& relation_layers() { return relation_; }
  const std::vector<RelationLayerParams>& relation_layers() const {
    return relation_;
  }
  DecoderParams& decoder() { return decoder_; }
  const DecoderParams& decoder() const { return decoder_; }

 private:
  ModelConfig config_;
  EncoderParams encoder_;
  std::vector<RelationLayerParams> relation_;
  DecoderParams decoder_;
};

}  // namespace dcrnet
