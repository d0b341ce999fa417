#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace dcrnet {

// How the dialog-act and sentiment branches exchange information per layer.
// None removes the interaction stack entirely.
enum class RelationKind { Concat, Mlp, CoAttention, None };

// Which BiLSTM states form the utterance vector: both directions at the
// final token position, or each direction's own endpoint.
enum class UtteranceRepr { LastPosition, DirectionEnds };

// Whether the neutral sentiment label is dropped from the macro average only,
// or its utterances are removed from scoring altogether.
enum class NeutralExclusion { FromAverage, FromData };

// Evaluation protocol: macro averages for both tasks, or prevalence-weighted
// act F1 with neutral-excluded sentiment macro.
enum class Protocol { DailyDialog, Mastodon };

std::string to_string(RelationKind kind);
RelationKind relation_kind_from(const std::string& name);
std::string to_string(UtteranceRepr repr);
UtteranceRepr utterance_repr_from(const std::string& name);
std::string to_string(NeutralExclusion mode);
NeutralExclusion neutral_exclusion_from(const std::string& name);
std::string to_string(Protocol protocol);
Protocol protocol_from(const std::string& name);

struct ModelConfig {
  std::int64_t d_emb = 128;
  std::int64_t d = 256;
  std::int64_t d_k = 0;  // 0 means "use d"
  RelationKind relation = RelationKind::CoAttention;
  std::int64_t layers = 3;
  double dropout = 0.25;
  double l2 = 1e-8;
  double lr = 1e-3;
  std::int64_t epochs = 50;
  std::int64_t batch_size = 16;
  std::uint64_t seed = 1;
  std::int64_t min_freq = 1;

  // ablations and variants
  bool no_self_attention = false;
  bool cnn_context = false;  // swap self-attention for a width-3 convolution
  UtteranceRepr utterance_repr = UtteranceRepr::LastPosition;
  bool shared_fusion_mlp = false;
  bool tie_layers = false;
  bool pre_transform_once = false;

  // dropout sites
  bool dropout_embeddings = true;
  bool dropout_context = true;

  // dev-selection metric: mean | da | sentiment
  std::string selection = "mean";

  // evaluation protocol and neutral-label handling for sentiment scoring
  Protocol protocol = Protocol::Mastodon;
  NeutralExclusion neutral_exclusion = NeutralExclusion::FromAverage;

  std::int64_t attention_dim() const { return d_k > 0 ? d_k : d; }
  // None means no interaction layers regardless of the configured depth.
  std::int64_t effective_layers() const {
    return relation == RelationKind::None ? 0 : layers;
  }

  void validate() const;  // throws std::invalid_argument on bad combinations

  // Flat key=value document, one pair per line, '#' comments allowed.
  static ModelConfig from_kv_text(const std::string& text);
  std::string to_kv_text() const;
  // Single key update with the same spellings as the kv document.
  void set(const std::string& key, const std::string& value);
};

}  // namespace dcrnet
