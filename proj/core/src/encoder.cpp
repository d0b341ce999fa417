#include "dcrnet/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace dcrnet {

Tensor glorot(std::int64_t rows, std::int64_t cols, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return Tensor::uniform(rows, cols, -r, r, rng, /*requires_grad=*/true);
}

LstmParams LstmParams::init(std::int64_t d_in, std::int64_t hidden,
                            Rng& rng) {
  LstmParams params;
  params.w_x = glorot(d_in, 4 * hidden, rng);
  params.w_h = glorot(hidden, 4 * hidden, rng);
  params.b = Tensor::zeros(1, 4 * hidden, /*requires_grad=*/true);
  return params;
}

Tensor lstm_run(const Tensor& x, const LstmParams& params, bool reverse) {
  const std::int64_t steps = x.rows();
  const std::int64_t h = params.hidden();
  Tensor state_h = Tensor::zeros(1, h);
  Tensor state_c = Tensor::zeros(1, h);
  std::vector<Tensor> outputs(static_cast<std::size_t>(steps));
  for (std::int64_t i = 0; i < steps; ++i) {
    const std::int64_t t = reverse ? steps - 1 - i : i;
    Tensor x_t = slice_rows(x, t, 1);
    Tensor gates = add_rowvec(
        add(matmul(x_t, params.w_x), matmul(state_h, params.w_h)), params.b);
    Tensor gi = sigmoid(slice_cols(gates, 0, h));
    Tensor gf = sigmoid(slice_cols(gates, h, h));
    Tensor gg = tanh(slice_cols(gates, 2 * h, h));
    Tensor go = sigmoid(slice_cols(gates, 3 * h, h));
    state_c = add(mul(gf, state_c), mul(gi, gg));
    state_h = mul(go, tanh(state_c));
    outputs[static_cast<std::size_t>(t)] = state_h;
  }
  return concat_rows(outputs);
}

BiLstmParams BiLstmParams::init(std::int64_t d_in, std::int64_t d_out,
                                Rng& rng) {
  if (d_out % 2 != 0) {
    throw std::invalid_argument("bidirectional width must be even, got " +
                                std::to_string(d_out));
  }
  BiLstmParams params;
  params.fwd = LstmParams::init(d_in, d_out / 2, rng);
  params.bwd = LstmParams::init(d_in, d_out / 2, rng);
  return params;
}

Tensor bilstm_run(const Tensor& x, const BiLstmParams& params) {
  return concat_cols(lstm_run(x, params.fwd, false),
                     lstm_run(x, params.bwd, true));
}

SelfAttentionParams SelfAttentionParams::init(std::int64_t d, Rng& rng) {
  SelfAttentionParams params;
  params.w_q = glorot(d, d, rng);
  params.w_k = glorot(d, d, rng);
  params.w_v = glorot(d, d, rng);
  return params;
}

AttentionResult self_attention(const Tensor& h,
                               const SelfAttentionParams& params,
                               std::int64_t d_k) {
  Tensor q = matmul(h, params.w_q);
  Tensor k = matmul(h, params.w_k);
  Tensor v = matmul(h, params.w_v);
  Tensor logits =
      scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(d_k)));
  AttentionResult result;
  result.weights = softmax_rows(logits);
  result.context = add(matmul(result.weights, v), h);
  return result;
}

ConvContextParams ConvContextParams::init(std::int64_t d, Rng& rng) {
  ConvContextParams params;
  params.w_prev = glorot(d, d, rng);
  params.w_self = glorot(d, d, rng);
  params.w_next = glorot(d, d, rng);
  params.b = Tensor::zeros(1, d, /*requires_grad=*/true);
  return params;
}

Tensor conv_context(const Tensor& h, const ConvContextParams& params) {
  const std::int64_t t = h.rows(), d = h.cols();
  Tensor pad = Tensor::zeros(1, d);
  Tensor prev = t > 1 ? concat_rows({pad, slice_rows(h, 0, t - 1)}) : pad;
  Tensor next = t > 1 ? concat_rows({slice_rows(h, 1, t - 1), pad}) : pad;
  Tensor mixed = add_rowvec(add(add(matmul(prev, params.w_prev),
                                    matmul(h, params.w_self)),
                                matmul(next, params.w_next)),
                            params.b);
  return add(relu(mixed), h);
}

EncoderParams EncoderParams::init(const ModelConfig& config,
                                  std::int64_t vocab_size, Rng& rng) {
  EncoderParams params;
  params.embeddings = Tensor::uniform(vocab_size, config.d_emb, -0.1, 0.1,
                                      rng, /*requires_grad=*/true);
  params.token_lstm = BiLstmParams::init(config.d_emb, config.d, rng);
  if (config.cnn_context) {
    params.conv = ConvContextParams::init(config.d, rng);
  } else if (!config.no_self_attention) {
    params.attention = SelfAttentionParams::init(config.d, rng);
  }
  return params;
}

Tensor encode_utterance(const std::vector<std::int64_t>& token_ids,
                        const EncoderParams& params,
                        const ModelConfig& config, bool training, Rng& rng) {
  if (token_ids.empty()) {
    throw std::invalid_argument("cannot encode an empty utterance");
  }
  Tensor embedded = embed_rows(params.embeddings, token_ids);
  if (config.dropout_embeddings) {
    embedded = dropout(embedded, config.dropout, training, rng);
  }
  const std::int64_t last = embedded.rows() - 1;
  if (config.utterance_repr == UtteranceRepr::LastPosition) {
    // both directions' states at the final token position
    return slice_rows(bilstm_run(embedded, params.token_lstm), last, 1);
  }
  // each direction's own endpoint: forward at the last token, backward at
  // the first
  Tensor fwd = lstm_run(embedded, params.token_lstm.fwd, false);
  Tensor bwd = lstm_run(embedded, params.token_lstm.bwd, true);
  return concat_cols(slice_rows(fwd, last, 1), slice_rows(bwd, 0, 1));
}

DialogEncoding encode_dialog(const EncodedDialog& dialog,
                             const EncoderParams& params,
                             const ModelConfig& config, bool training,
                             Rng& rng) {
  if (dialog.utterances.empty()) {
    throw std::invalid_argument("cannot encode an empty dialog");
  }
  std::vector<Tensor> rows;
  rows.reserve(dialog.utterances.size());
  for (const EncodedUtterance& utt : dialog.utterances) {
    rows.push_back(
        encode_utterance(utt.token_ids, params, config, training, rng));
  }
  DialogEncoding encoding;
  encoding.h = concat_rows(rows);
  if (config.no_self_attention) {
    encoding.context = encoding.h;
  } else if (config.cnn_context) {
    encoding.context = conv_context(encoding.h, params.conv);
  } else {
    AttentionResult attended =
        self_attention(encoding.h, params.attention, config.attention_dim());
    encoding.context = attended.context;
    encoding.attention_weights = attended.weights;
  }
  if (config.dropout_context) {
    encoding.context =
        dropout(encoding.context, config.dropout, training, rng);
  }
  return encoding;
}

}  // namespace dcrnet
