#include "dcrnet/model.hpp"

#include <unordered_set>

namespace dcrnet {

Model::Model(const ModelConfig& config, std::int64_t vocab_size,
             std::int64_t n_da, std::int64_t n_sent, Rng& rng)
    : config_(config) {
  config_.validate();
  encoder_ = EncoderParams::init(config_, vocab_size, rng);
  std::int64_t n_layers = config_.effective_layers();
  if (n_layers > 0) {
    relation_.push_back(RelationLayerParams::init(
        config_.relation, config_.d, config_.shared_fusion_mlp, rng));
    for (std::int64_t l = 1; l < n_layers; ++l) {
      if (config_.tie_layers) {
        relation_.push_back(relation_.front());  // aliases the same tensors
      } else {
        relation_.push_back(RelationLayerParams::init(
            config_.relation, config_.d, config_.shared_fusion_mlp, rng));
      }
    }
  }
  decoder_ = DecoderParams::init(config_.d, n_da, n_sent, rng);
}

Model::Forward Model::forward(const EncodedDialog& dialog, bool training,
                              Rng& rng) const {
  Forward out;
  out.encoding = encode_dialog(dialog, encoder_, config_, training, rng);
  out.stacked = stack(out.encoding.context, out.encoding.context, config_,
                      relation_);
  out.predictions = predict(out.stacked.d_final, out.stacked.s_final,
                            decoder_);
  return out;
}

namespace {

void push_param(std::vector<NamedParam>& out,
                std::unordered_set<const void*>& seen, const std::string& name,
                const Tensor& t) {
  if (!t.defined()) return;
  if (!seen.insert(t.id()).second) return;
  out.push_back({name, t});
}

void push_lstm(std::vector<NamedParam>& out,
               std::unordered_set<const void*>& seen, const std::string& base,
               const BiLstmParams& lstm) {
  push_param(out, seen, base + ".fwd.w_x", lstm.fwd.w_x);
  push_param(out, seen, base + ".fwd.w_h", lstm.fwd.w_h);
  push_param(out, seen, base + ".fwd.b", lstm.fwd.b);
  push_param(out, seen, base + ".bwd.w_x", lstm.bwd.w_x);
  push_param(out, seen, base + ".bwd.w_h", lstm.bwd.w_h);
  push_param(out, seen, base + ".bwd.b", lstm.bwd.b);
}

}  // namespace

std::vector<NamedParam> Model::parameters() const {
  std::vector<NamedParam> out;
  std::unordered_set<const void*> seen;
  push_param(out, seen, "embeddings", encoder_.embeddings);
  push_lstm(out, seen, "token_lstm", encoder_.token_lstm);
  push_param(out, seen, "attention.w_q", encoder_.attention.w_q);
  push_param(out, seen, "attention.w_k", encoder_.attention.w_k);
  push_param(out, seen, "attention.w_v", encoder_.attention.w_v);
  push_param(out, seen, "conv.w_prev", encoder_.conv.w_prev);
  push_param(out, seen, "conv.w_self", encoder_.conv.w_self);
  push_param(out, seen, "conv.w_next", encoder_.conv.w_next);
  push_param(out, seen, "conv.b", encoder_.conv.b);
  for (std::size_t l = 0; l < relation_.size(); ++l) {
    const RelationLayerParams& layer = relation_[l];
    std::string base = "relation." + std::to_string(l);
    push_lstm(out, seen, base + ".act_lstm", layer.act_lstm);
    push_param(out, seen, base + ".s_w1", layer.s_w1);
    push_param(out, seen, base + ".s_b1", layer.s_b1);
    push_param(out, seen, base + ".s_w2", layer.s_w2);
    push_param(out, seen, base + ".s_b2", layer.s_b2);
    push_param(out, seen, base + ".proj_d", layer.proj_d);
    push_param(out, seen, base + ".proj_s", layer.proj_s);
    push_param(out, seen, base + ".fd_w1", layer.fd_w1);
    push_param(out, seen, base + ".fd_b1", layer.fd_b1);
    push_param(out, seen, base + ".fd_w2", layer.fd_w2);
    push_param(out, seen, base + ".fd_b2", layer.fd_b2);
    push_param(out, seen, base + ".fs_w1", layer.fs_w1);
    push_param(out, seen, base + ".fs_b1", layer.fs_b1);
    push_param(out, seen, base + ".fs_w2", layer.fs_w2);
    push_param(out, seen, base + ".fs_b2", layer.fs_b2);
  }
  push_param(out, seen, "decoder.w_da", decoder_.w_da);
  push_param(out, seen, "decoder.b_da", decoder_.b_da);
  push_param(out, seen, "decoder.w_sent", decoder_.w_sent);
  push_param(out, seen, "decoder.b_sent", decoder_.b_sent);
  return out;
}

std::int64_t Model::parameter_count() const {
  std::int64_t total = 0;
  for (const NamedParam& p : parameters()) total += p.tensor.size();
  return total;
}

}  // namespace dcrnet
