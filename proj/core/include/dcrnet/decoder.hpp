#pragma once

#include <cstdint>
#include <vector>

#include "dcrnet/tensor.hpp"

namespace dcrnet {

struct DecoderParams {
  Tensor w_da, b_da;      // d x |DA|, 1 x |DA|
  Tensor w_sent, b_sent;  // d x |Sent|, 1 x |Sent|

  static DecoderParams init(std::int64_t d, std::int64_t n_da,
                            std::int64_t n_sent, Rng& rng);
};

struct PredictionBatch {
  Tensor da_probs;    // T x |DA|, row-stochastic
  Tensor sent_probs;  // T x |Sent|
  std::vector<std::int64_t> da_pred;    // argmax, ties to the lowest index
  std::vector<std::int64_t> sent_pred;
};

PredictionBatch predict(const Tensor& d_final, const Tensor& s_final,
                        const DecoderParams& params);

// Sum of per-row cross-entropies against the gold indices.
Tensor task_loss(const Tensor& probs, const std::vector<std::int64_t>& gold);

// Joint objective: DA loss + sentiment loss, exactly additive.
Tensor joint_loss(const PredictionBatch& predictions,
                  const std::vector<std::int64_t>& gold_da,
                  const std::vector<std::int64_t>& gold_sent);

std::vector<std::int64_t> argmax_rows(const Tensor& probs);

}  // namespace dcrnet
