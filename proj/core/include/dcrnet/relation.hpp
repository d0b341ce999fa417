#pragma once

#include <cstdint>
#include <vector>

#include "dcrnet/config.hpp"
#include "dcrnet/encoder.hpp"
#include "dcrnet/tensor.hpp"

namespace dcrnet {

// Parameters for one interaction layer. Only the tensors the configured
// variant needs are defined; the rest stay default-constructed.
struct RelationLayerParams {
  // pre-fusion task-specific transforms: a BiLSTM over the utterance rows
  // for the act branch, a position-wise tanh MLP for the sentiment branch
  BiLstmParams act_lstm;                  // d -> d
  Tensor s_w1, s_b1, s_w2, s_b2;          // d -> d, hidden width d

  // Concat variant: fused-matrix projections back to width d
  Tensor proj_d, proj_s;                  // 2d -> d

  // Mlp variant: per-branch fusion MLPs 2d -> d, tanh hidden of width 2d.
  // Under shared_fusion_mlp the sentiment tensors stay undefined and both
  // branches run through the act-branch MLP.
  Tensor fd_w1, fd_b1, fd_w2, fd_b2;
  Tensor fs_w1, fs_b1, fs_w2, fs_b2;

  static RelationLayerParams init(RelationKind kind, std::int64_t d,
                                  bool shared_fusion_mlp, Rng& rng);
};

struct PreTransformed {
  Tensor d_prime;  // BiLSTM(D)
  Tensor s_prime;  // MLP(S)
};

PreTransformed pre_transform(const Tensor& d_in, const Tensor& s_in,
                             const RelationLayerParams& params);

// One fusion step. For Concat and Mlp these are the raw fused outputs —
// the residual over the pre-transformed inputs is added by stack(), so that
// identical fusion functions of identical inputs stay exactly equal here.
// CoAttention carries its residual inside, as its update rule dictates.
struct RelationOutput {
  Tensor d_out;
  Tensor s_out;
  // CoAttention only: cross-task logits and row-stochastic weights
  Tensor d_from_s_logits, s_from_d_logits;
  Tensor d_from_s_weights, s_from_d_weights;
};

RelationOutput relate_concat(const Tensor& d_prime, const Tensor& s_prime,
                             const RelationLayerParams& params);
RelationOutput relate_mlp(const Tensor& d_prime, const Tensor& s_prime,
                          const RelationLayerParams& params);
RelationOutput relate_coattention(const Tensor& d_prime,
                                  const Tensor& s_prime);

// Cross-task attention maps recorded per layer (CoAttention only).
struct StackTrace {
  std::vector<Tensor> d_from_s;  // act side attending over sentiment rows
  std::vector<Tensor> s_from_d;
};

struct StackResult {
  Tensor d_final;
  Tensor s_final;
  StackTrace trace;
};

// Applies pre_transform + fusion + residual, layer by layer. kind None (or
// an empty layer list) passes the inputs through unchanged.
StackResult stack(const Tensor& d0, const Tensor& s0,
                  const ModelConfig& config,
                  const std::vector<RelationLayerParams>& layers);

}  // namespace dcrnet
