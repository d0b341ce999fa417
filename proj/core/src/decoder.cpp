#include "dcrnet/decoder.hpp"

#include <stdexcept>

#include "dcrnet/encoder.hpp"

namespace dcrnet {

DecoderParams DecoderParams::init(std::int64_t d, std::int64_t n_da,
                                  std::int64_t n_sent, Rng& rng) {
  DecoderParams params;
  params.w_da = glorot(d, n_da, rng);
  params.b_da = Tensor::zeros(1, n_da, true);
  params.w_sent = glorot(d, n_sent, rng);
  params.b_sent = Tensor::zeros(1, n_sent, true);
  return params;
}

std::vector<std::int64_t> argmax_rows(const Tensor& probs) {
  std::vector<std::int64_t> picks(static_cast<std::size_t>(probs.rows()));
  for (std::int64_t i = 0; i < probs.rows(); ++i) {
    std::int64_t best = 0;
    for (std::int64_t j = 1; j < probs.cols(); ++j) {
      if (probs.at(i, j) > probs.at(i, best)) best = j;
    }
    picks[static_cast<std::size_t>(i)] = best;
  }
  return picks;
}

PredictionBatch predict(const Tensor& d_final, const Tensor& s_final,
                        const DecoderParams& params) {
  PredictionBatch batch;
  batch.da_probs =
      softmax_rows(add_rowvec(matmul(d_final, params.w_da), params.b_da));
  batch.sent_probs =
      softmax_rows(add_rowvec(matmul(s_final, params.w_sent), params.b_sent));
  batch.da_pred = argmax_rows(batch.da_probs);
  batch.sent_pred = argmax_rows(batch.sent_probs);
  return batch;
}

Tensor task_loss(const Tensor& probs, const std::vector<std::int64_t>& gold) {
  if (static_cast<std::int64_t>(gold.size()) != probs.rows()) {
    throw std::invalid_argument(
        "task_loss: " + std::to_string(gold.size()) + " gold labels for " +
        std::to_string(probs.rows()) + " predictions");
  }
  Tensor total = cross_entropy(slice_rows(probs, 0, 1), gold[0]);
  for (std::size_t t = 1; t < gold.size(); ++t) {
    total = add(total, cross_entropy(slice_rows(probs, static_cast<std::int64_t>(t), 1),
                                     gold[t]));
  }
  return total;
}

Tensor joint_loss(const PredictionBatch& predictions,
                  const std::vector<std::int64_t>& gold_da,
                  const std::vector<std::int64_t>& gold_sent) {
  return add(task_loss(predictions.da_probs, gold_da),
             task_loss(predictions.sent_probs, gold_sent));
}

}  // namespace dcrnet
