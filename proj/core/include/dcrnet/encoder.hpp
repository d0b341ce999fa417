#pragma once

#include <cstdint>
#include <vector>

#include "dcrnet/config.hpp"
#include "dcrnet/corpus.hpp"
#include "dcrnet/tensor.hpp"

namespace dcrnet {

// Fused-gate LSTM weights, gate order [input | forget | cell | output].
struct LstmParams {
  Tensor w_x;  // d_in x 4h
  Tensor w_h;  // h x 4h
  Tensor b;    // 1 x 4h

  static LstmParams init(std::int64_t d_in, std::int64_t hidden, Rng& rng);
  std::int64_t hidden() const { return w_h.rows(); }
};

// Hidden states for every position, seq x h. reverse=true consumes the rows
// last-to-first but keeps the output aligned with the input order.
Tensor lstm_run(const Tensor& x, const LstmParams& params, bool reverse);

struct BiLstmParams {
  LstmParams fwd;
  LstmParams bwd;

  // d_out split evenly across the two directions.
  static BiLstmParams init(std::int64_t d_in, std::int64_t d_out, Rng& rng);
  std::int64_t width() const { return 2 * fwd.hidden(); }
};

// Position-wise concat of both directions' states, seq x d_out.
Tensor bilstm_run(const Tensor& x, const BiLstmParams& params);

struct SelfAttentionParams {
  Tensor w_q, w_k, w_v;  // each d x d
  static SelfAttentionParams init(std::int64_t d, Rng& rng);
};

struct AttentionResult {
  Tensor context;  // T x d, already includes the +H residual
  Tensor weights;  // T x T row-stochastic
};

// Scaled dot-product attention over utterance rows with a residual:
// softmax(Q K^T / sqrt(d_k)) V + H.
AttentionResult self_attention(const Tensor& h,
                               const SelfAttentionParams& params,
                               std::int64_t d_k);

// Width-3 convolution over utterance rows (zero-padded) with a residual;
// stands in for self-attention under the cnn_context variant.
struct ConvContextParams {
  Tensor w_prev, w_self, w_next;  // each d x d
  Tensor b;                       // 1 x d
  static ConvContextParams init(std::int64_t d, Rng& rng);
};
Tensor conv_context(const Tensor& h, const ConvContextParams& params);

struct EncoderParams {
  Tensor embeddings;  // |V| x d_emb, trained from scratch
  BiLstmParams token_lstm;
  SelfAttentionParams attention;
  ConvContextParams conv;  // only trained under cnn_context

  static EncoderParams init(const ModelConfig& config,
                            std::int64_t vocab_size, Rng& rng);
};

struct DialogEncoding {
  Tensor h;                  // T x d utterance representations
  Tensor context;            // T x d after context mixing (C); D0 = S0 = C
  Tensor attention_weights;  // T x T, undefined under the ablations
};

// One utterance to a 1 x d vector: embeddings -> BiLSTM -> state selection
// per config.utterance_repr.
Tensor encode_utterance(const std::vector<std::int64_t>& token_ids,
                        const EncoderParams& params,
                        const ModelConfig& config, bool training, Rng& rng);

DialogEncoding encode_dialog(const EncodedDialog& dialog,
                             const EncoderParams& params,
                             const ModelConfig& config, bool training,
                             Rng& rng);

// Shared initializer: Glorot-uniform over fan-in/fan-out.
Tensor glorot(std::int64_t rows, std::int64_t cols, Rng& rng);

}  // namespace dcrnet
