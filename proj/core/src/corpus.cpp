#include "dcrnet/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "dcrnet/io_util.hpp"

namespace dcrnet {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- LabelMap ----

LabelMap LabelMap::over(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  LabelMap map;
  map.labels_ = std::move(labels);
  for (std::size_t i = 0; i < map.labels_.size(); ++i) {
    map.index_.emplace(map.labels_[i], static_cast<std::int64_t>(i));
  }
  return map;
}

std::int64_t LabelMap::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) {
    throw std::out_of_range("unknown label \"" + label + "\"");
  }
  return it->second;
}

const std::string& LabelMap::label_of(std::int64_t index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("label index " + std::to_string(index) +
                            " out of range for " + std::to_string(size()) +
                            " labels");
  }
  return labels_[static_cast<std::size_t>(index)];
}

bool LabelMap::contains(const std::string& label) const {
  return index_.count(label) > 0;
}

std::optional<std::int64_t> LabelMap::neutral_index() const {
  auto it = index_.find("neutral");
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---- Vocabulary ----

Vocabulary Vocabulary::build(const std::vector<Dialog>& train_split,
                             std::int64_t min_freq) {
  if (min_freq < 1) {
    throw std::invalid_argument("vocabulary min_freq must be >= 1");
  }
  std::map<std::string, std::int64_t> freq;  // ordered for deterministic ties
  for (const Dialog& dialog : train_split) {
    for (const Utterance& utt : dialog.utterances) {
      for (const std::string& token : utt.tokens) ++freq[token];
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [token, count] : freq) {
    if (count >= min_freq) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [token, count] : kept) tokens.push_back(std::move(token));
  return from_tokens(std::move(tokens), min_freq);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> kept_tokens,
                                   std::int64_t min_freq) {
  Vocabulary vocab;
  vocab.min_freq_ = min_freq;
  vocab.tokens_.reserve(kept_tokens.size() + 2);
  vocab.tokens_.push_back("<pad>");
  vocab.tokens_.push_back("<unk>");
  for (std::string& token : kept_tokens) {
    vocab.tokens_.push_back(std::move(token));
  }
  for (std::size_t i = 0; i < vocab.tokens_.size(); ++i) {
    vocab.index_.emplace(vocab.tokens_[i], static_cast<std::int64_t>(i));
  }
  return vocab;
}

std::int64_t Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(std::int64_t index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("token index " + std::to_string(index) +
                            " out of range for vocabulary of " +
                            std::to_string(size()));
  }
  return tokens_[static_cast<std::size_t>(index)];
}

// ---- canonical JSON-lines ----

namespace {

Utterance parse_utterance(const json& j, const std::string& where,
                          bool require_labels) {
  if (!j.is_object()) {
    throw std::runtime_error(where + ": utterance is not an object");
  }
  Utterance utt;
  if (!j.contains("tokens") || !j.at("tokens").is_array() ||
      j.at("tokens").empty()) {
    throw std::runtime_error(where + ": missing or empty \"tokens\"");
  }
  for (const json& tok : j.at("tokens")) {
    if (!tok.is_string()) {
      throw std::runtime_error(where + ": non-string token");
    }
    utt.tokens.push_back(tok.get<std::string>());
  }
  auto read_label = [&](const char* key) -> std::string {
    if (!j.contains(key) || j.at(key).is_null()) {
      if (require_labels) {
        throw std::runtime_error(where + ": missing \"" + key + "\" label");
      }
      return {};
    }
    if (!j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
      throw std::runtime_error(where + ": \"" + std::string(key) +
                               "\" must be a non-empty string");
    }
    return j.at(key).get<std::string>();
  };
  utt.da = read_label("da");
  utt.sentiment = read_label("sentiment");
  if (j.contains("speaker") && !j.at("speaker").is_null()) {
    if (!j.at("speaker").is_string()) {
      throw std::runtime_error(where + ": \"speaker\" must be a string or null");
    }
    utt.speaker = j.at("speaker").get<std::string>();
  }
  return utt;
}

}  // namespace

std::vector<Dialog> load_dialog_file(const std::string& path,
                                     bool require_labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Dialog> dialogs;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(where + ": parse error: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.at("id").is_string()) {
      throw std::runtime_error(where + ": dialog needs a string \"id\"");
    }
    Dialog dialog;
    dialog.id = j.at("id").get<std::string>();
    if (!j.contains("utterances") || !j.at("utterances").is_array() ||
        j.at("utterances").empty()) {
      throw std::runtime_error(where + ": dialog \"" + dialog.id +
                               "\" has no utterances");
    }
    for (const json& u : j.at("utterances")) {
      dialog.utterances.push_back(
          parse_utterance(u, where + " dialog " + dialog.id, require_labels));
    }
    dialogs.push_back(std::move(dialog));
  }
  if (dialogs.empty()) {
    throw std::runtime_error(path + ": no dialogs (empty corpus)");
  }
  return dialogs;
}

std::string dialogs_to_jsonl(const std::vector<Dialog>& dialogs) {
  std::ostringstream out;
  for (const Dialog& dialog : dialogs) {
    json j;
    j["id"] = dialog.id;
    json utts = json::array();
    for (const Utterance& utt : dialog.utterances) {
      json u;
      u["speaker"] = utt.speaker ? json(*utt.speaker) : json(nullptr);
      u["tokens"] = utt.tokens;
      if (!utt.da.empty()) u["da"] = utt.da;
      if (!utt.sentiment.empty()) u["sentiment"] = utt.sentiment;
      utts.push_back(std::move(u));
    }
    j["utterances"] = std::move(utts);
    out << j.dump() << "\n";
  }
  return out.str();
}

void save_dialog_file(const std::vector<Dialog>& dialogs,
                      const std::string& path) {
  atomic_write_file(path, dialogs_to_jsonl(dialogs));
}

Corpus load_canonical(const std::string& path) {
  Corpus corpus;
  if (fs::is_directory(path)) {
    const fs::path dir(path);
    corpus.train = load_dialog_file((dir / "train.jsonl").string());
    corpus.dev = load_dialog_file((dir / "dev.jsonl").string());
    corpus.test = load_dialog_file((dir / "test.jsonl").string());
  } else {
    corpus.train = load_dialog_file(path);
  }
  std::vector<std::string> da, sent;
  for (const auto* split : {&corpus.train, &corpus.dev, &corpus.test}) {
    for (const Dialog& dialog : *split) {
      for (const Utterance& utt : dialog.utterances) {
        da.push_back(utt.da);
        sent.push_back(utt.sentiment);
      }
    }
  }
  corpus.da_labels = LabelMap::over(std::move(da));
  corpus.sentiment_labels = LabelMap::over(std::move(sent));
  return corpus;
}

// ---- encoding ----

EncodedDialog encode_dialog(const Dialog& dialog, const Vocabulary& vocab,
                            const LabelMap& da_labels,
                            const LabelMap& sentiment_labels) {
  EncodedDialog encoded;
  encoded.id = dialog.id;
  for (std::size_t i = 0; i < dialog.utterances.size(); ++i) {
    const Utterance& utt = dialog.utterances[i];
    EncodedUtterance e;
    e.token_ids.reserve(utt.tokens.size());
    for (const std::string& token : utt.tokens) {
      e.token_ids.push_back(vocab.index_of(token));
    }
    auto lookup = [&](const LabelMap& map, const std::string& label,
                      const char* task) -> std::int64_t {
      if (label.empty()) return -1;
      if (!map.contains(label)) {
        throw std::out_of_range("unknown " + std::string(task) + " label \"" +
                                label + "\" at dialog " + dialog.id +
                                " utterance " + std::to_string(i));
      }
      return map.index_of(label);
    };
    e.da = lookup(da_labels, utt.da, "dialog-act");
    e.sentiment = lookup(sentiment_labels, utt.sentiment, "sentiment");
    encoded.utterances.push_back(std::move(e));
  }
  return encoded;
}

std::vector<EncodedDialog> encode_split(const std::vector<Dialog>& split,
                                        const Vocabulary& vocab,
                                        const LabelMap& da_labels,
                                        const LabelMap& sentiment_labels) {
  std::vector<EncodedDialog> out;
  out.reserve(split.size());
  for (const Dialog& dialog : split) {
    out.push_back(encode_dialog(dialog, vocab, da_labels, sentiment_labels));
  }
  return out;
}

}  // namespace dcrnet
