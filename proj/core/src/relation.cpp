#include "dcrnet/relation.hpp"

#include <stdexcept>

namespace dcrnet {

RelationLayerParams RelationLayerParams::init(RelationKind kind,
                                              std::int64_t d,
                                              bool shared_fusion_mlp,
                                              Rng& rng) {
  RelationLayerParams params;
  params.act_lstm = BiLstmParams::init(d, d, rng);
  params.s_w1 = glorot(d, d, rng);
  params.s_b1 = Tensor::zeros(1, d, true);
  params.s_w2 = glorot(d, d, rng);
  params.s_b2 = Tensor::zeros(1, d, true);
  if (kind == RelationKind::Concat) {
    params.proj_d = glorot(2 * d, d, rng);
    params.proj_s = glorot(2 * d, d, rng);
  } else if (kind == RelationKind::Mlp) {
    params.fd_w1 = glorot(2 * d, 2 * d, rng);
    params.fd_b1 = Tensor::zeros(1, 2 * d, true);
    params.fd_w2 = glorot(2 * d, d, rng);
    params.fd_b2 = Tensor::zeros(1, d, true);
    if (!shared_fusion_mlp) {
      params.fs_w1 = glorot(2 * d, 2 * d, rng);
      params.fs_b1 = Tensor::zeros(1, 2 * d, true);
      params.fs_w2 = glorot(2 * d, d, rng);
      params.fs_b2 = Tensor::zeros(1, d, true);
    }
  }
  return params;
}

PreTransformed pre_transform(const Tensor& d_in, const Tensor& s_in,
                             const RelationLayerParams& params) {
  PreTransformed out;
  out.d_prime = bilstm_run(d_in, params.act_lstm);
  Tensor hidden = tanh(add_rowvec(matmul(s_in, params.s_w1), params.s_b1));
  out.s_prime = add_rowvec(matmul(hidden, params.s_w2), params.s_b2);
  return out;
}

RelationOutput relate_concat(const Tensor& d_prime, const Tensor& s_prime,
                             const RelationLayerParams& params) {
  if (!params.proj_d.defined()) {
    throw std::invalid_argument(
        "relate_concat called without concat projections");
  }
  Tensor fused = concat_cols(s_prime, d_prime);
  RelationOutput out;
  out.d_out = matmul(fused, params.proj_d);
  out.s_out = matmul(fused, params.proj_s);
  return out;
}

namespace {

Tensor fusion_mlp(const Tensor& fused, const Tensor& w1, const Tensor& b1,
                  const Tensor& w2, const Tensor& b2) {
  Tensor hidden = tanh(add_rowvec(matmul(fused, w1), b1));
  return add_rowvec(matmul(hidden, w2), b2);
}

}  // namespace

RelationOutput relate_mlp(const Tensor& d_prime, const Tensor& s_prime,
                          const RelationLayerParams& params) {
  if (!params.fd_w1.defined()) {
    throw std::invalid_argument("relate_mlp called without fusion MLPs");
  }
  Tensor fused = concat_cols(s_prime, d_prime);
  RelationOutput out;
  out.d_out = fusion_mlp(fused, params.fd_w1, params.fd_b1, params.fd_w2,
                         params.fd_b2);
  if (params.fs_w1.defined()) {
    out.s_out = fusion_mlp(fused, params.fs_w1, params.fs_b1, params.fs_w2,
                           params.fs_b2);
  } else {  // shared fusion: both branches are the same function of F
    out.s_out = fusion_mlp(fused, params.fd_w1, params.fd_b1, params.fd_w2,
                           params.fd_b2);
  }
  return out;
}

RelationOutput relate_coattention(const Tensor& d_prime,
                                  const Tensor& s_prime) {
  RelationOutput out;
  out.d_from_s_logits = matmul(d_prime, transpose(s_prime));
  out.s_from_d_logits = matmul(s_prime, transpose(d_prime));
  out.d_from_s_weights = softmax_rows(out.d_from_s_logits);
  out.s_from_d_weights = softmax_rows(out.s_from_d_logits);
  out.d_out = add(d_prime, matmul(out.d_from_s_weights, s_prime));
  out.s_out = add(s_prime, matmul(out.s_from_d_weights, d_prime));
  return out;
}

StackResult stack(const Tensor& d0, const Tensor& s0,
                  const ModelConfig& config,
                  const std::vector<RelationLayerParams>& layers) {
  StackResult result;
  result.d_final = d0;
  result.s_final = s0;
  if (config.relation == RelationKind::None || layers.empty()) {
    return result;
  }
  PreTransformed primes;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const RelationLayerParams& params = layers[l];
    if (l == 0 || !config.pre_transform_once) {
      primes = pre_transform(result.d_final, result.s_final, params);
    } else {
      primes.d_prime = result.d_final;
      primes.s_prime = result.s_final;
    }
    RelationOutput fused;
    switch (config.relation) {
      case RelationKind::Concat:
        fused = relate_concat(primes.d_prime, primes.s_prime, params);
        result.d_final = add(fused.d_out, primes.d_prime);
        result.s_final = add(fused.s_out, primes.s_prime);
        break;
      case RelationKind::Mlp:
        fused = relate_mlp(primes.d_prime, primes.s_prime, params);
        result.d_final = add(fused.d_out, primes.d_prime);
        result.s_final = add(fused.s_out, primes.s_prime);
        break;
      case RelationKind::CoAttention:
        fused = relate_coattention(primes.d_prime, primes.s_prime);
        result.d_final = fused.d_out;
        result.s_final = fused.s_out;
        result.trace.d_from_s.push_back(fused.d_from_s_weights);
        result.trace.s_from_d.push_back(fused.s_from_d_weights);
        break;
      case RelationKind::None:
        break;  // unreachable
    }
  }
  return result;
}

}  // namespace dcrnet
