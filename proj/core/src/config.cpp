#include "dcrnet/config.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace dcrnet {

std::string to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::Concat: return "concat";
    case RelationKind::Mlp: return "mlp";
    case RelationKind::CoAttention: return "coattention";
    case RelationKind::None: return "none";
  }
  throw std::logic_error("unhandled relation kind");
}

RelationKind relation_kind_from(const std::string& name) {
  if (name == "concat") return RelationKind::Concat;
  if (name == "mlp") return RelationKind::Mlp;
  if (name == "coattention") return RelationKind::CoAttention;
  if (name == "none") return RelationKind::None;
  throw std::invalid_argument(
      "unknown relation kind \"" + name +
      "\" (expected concat, mlp, coattention or none)");
}

std::string to_string(UtteranceRepr repr) {
  return repr == UtteranceRepr::LastPosition ? "last_position"
                                             : "direction_ends";
}

UtteranceRepr utterance_repr_from(const std::string& name) {
  if (name == "last_position") return UtteranceRepr::LastPosition;
  if (name == "direction_ends") return UtteranceRepr::DirectionEnds;
  throw std::invalid_argument(
      "unknown utterance_repr \"" + name +
      "\" (expected last_position or direction_ends)");
}

std::string to_string(NeutralExclusion mode) {
  return mode == NeutralExclusion::FromAverage ? "from_average" : "from_data";
}

NeutralExclusion neutral_exclusion_from(const std::string& name) {
  if (name == "from_average") return NeutralExclusion::FromAverage;
  if (name == "from_data") return NeutralExclusion::FromData;
  throw std::invalid_argument("unknown exclusion \"" + name +
                              "\" (expected from_average or from_data)");
}

std::string to_string(Protocol protocol) {
  return protocol == Protocol::DailyDialog ? "dailydialog" : "mastodon";
}

Protocol protocol_from(const std::string& name) {
  if (name == "dailydialog") return Protocol::DailyDialog;
  if (name == "mastodon") return Protocol::Mastodon;
  throw std::invalid_argument("unknown protocol \"" + name +
                              "\" (expected dailydialog or mastodon)");
}

void ModelConfig::validate() const {
  auto positive = [](std::int64_t v, const char* name) {
    if (v <= 0) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  };
  positive(d_emb, "d_emb");
  positive(d, "d");
  positive(epochs, "epochs");
  positive(batch_size, "batch_size");
  positive(min_freq, "min_freq");
  if (d % 2 != 0) {
    throw std::invalid_argument(
        "d must be even (split across two recurrent directions)");
  }
  if (d_k < 0) throw std::invalid_argument("d_k must be non-negative");
  if (relation != RelationKind::None && layers < 1) {
    throw std::invalid_argument(
        "layers must be >= 1 unless relation = none");
  }
  if (layers < 0) throw std::invalid_argument("layers must be >= 0");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw std::invalid_argument("dropout must be in [0, 1)");
  }
  if (l2 < 0.0) throw std::invalid_argument("l2 must be non-negative");
  if (lr <= 0.0) throw std::invalid_argument("lr must be positive");
  if (selection != "mean" && selection != "da" && selection != "sentiment") {
    throw std::invalid_argument(
        "selection must be mean, da or sentiment, got \"" + selection + "\"");
  }
  if (no_self_attention && cnn_context) {
    throw std::invalid_argument(
        "no_self_attention and cnn_context are mutually exclusive");
  }
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("expected true/false for " + key + ", got \"" +
                              value + "\"");
}

std::int64_t parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer for " + key +
                                ", got \"" + value + "\"");
  }
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number for " + key + ", got \"" +
                                value + "\"");
  }
}

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void ModelConfig::set(const std::string& key, const std::string& value) {
  if (key == "d_emb") d_emb = parse_int(value, key);
  else if (key == "d") d = parse_int(value, key);
  else if (key == "d_k") d_k = parse_int(value, key);
  else if (key == "relation") relation = relation_kind_from(value);
  else if (key == "layers") layers = parse_int(value, key);
  else if (key == "dropout") dropout = parse_double(value, key);
  else if (key == "l2") l2 = parse_double(value, key);
  else if (key == "lr") lr = parse_double(value, key);
  else if (key == "epochs") epochs = parse_int(value, key);
  else if (key == "batch_size") batch_size = parse_int(value, key);
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(value, key));
  else if (key == "min_freq") min_freq = parse_int(value, key);
  else if (key == "no_self_attention") no_self_attention = parse_bool(value, key);
  else if (key == "cnn_context") cnn_context = parse_bool(value, key);
  else if (key == "utterance_repr") utterance_repr = utterance_repr_from(value);
  else if (key == "shared_fusion_mlp") shared_fusion_mlp = parse_bool(value, key);
  else if (key == "tie_layers") tie_layers = parse_bool(value, key);
  else if (key == "pre_transform_once") pre_transform_once = parse_bool(value, key);
  else if (key == "dropout_embeddings") dropout_embeddings = parse_bool(value, key);
  else if (key == "dropout_context") dropout_context = parse_bool(value, key);
  else if (key == "selection") selection = value;
  else if (key == "protocol") protocol = protocol_from(value);
  else if (key == "neutral_exclusion") neutral_exclusion = neutral_exclusion_from(value);
  else throw std::invalid_argument("unknown config key \"" + key + "\"");
}

ModelConfig ModelConfig::from_kv_text(const std::string& text) {
  ModelConfig config;
  std::istringstream in(text);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got \"" + line +
                                  "\"");
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

namespace {

// shortest decimal form that parses back to the same double
std::string double_text(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

}  // namespace

std::string ModelConfig::to_kv_text() const {
  std::ostringstream out;
  out << "d_emb = " << d_emb << "\n"
      << "d = " << d << "\n"
      << "d_k = " << d_k << "\n"
      << "relation = " << to_string(relation) << "\n"
      << "layers = " << layers << "\n"
      << "dropout = " << double_text(dropout) << "\n"
      << "l2 = " << double_text(l2) << "\n"
      << "lr = " << double_text(lr) << "\n"
      << "epochs = " << epochs << "\n"
      << "batch_size = " << batch_size << "\n"
      << "seed = " << seed << "\n"
      << "min_freq = " << min_freq << "\n"
      << "no_self_attention = " << (no_self_attention ? "true" : "false") << "\n"
      << "cnn_context = " << (cnn_context ? "true" : "false") << "\n"
      << "utterance_repr = " << to_string(utterance_repr) << "\n"
      << "shared_fusion_mlp = " << (shared_fusion_mlp ? "true" : "false") << "\n"
      << "tie_layers = " << (tie_layers ? "true" : "false") << "\n"
      << "pre_transform_once = " << (pre_transform_once ? "true" : "false") << "\n"
      << "dropout_embeddings = " << (dropout_embeddings ? "true" : "false") << "\n"
      << "dropout_context = " << (dropout_context ? "true" : "false") << "\n"
      << "selection = " << selection << "\n"
      << "protocol = " << to_string(protocol) << "\n"
      << "neutral_exclusion = " << to_string(neutral_exclusion) << "\n";
  return out.str();
}

}  // namespace dcrnet
