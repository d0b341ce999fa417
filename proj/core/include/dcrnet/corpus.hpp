#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace dcrnet {

struct Utterance {
  std::vector<std::string> tokens;  // non-empty
  std::string da;                   // empty only when loaded without labels
  std::string sentiment;
  std::optional<std::string> speaker;
};

struct Dialog {
  std::string id;
  std::vector<Utterance> utterances;  // at least one, order preserved
};

// Dense, deterministic label <-> index mapping. Labels are sorted
// lexicographically so the map depends only on the label set.
class LabelMap {
 public:
  LabelMap() = default;
  static LabelMap over(std::vector<std::string> labels);

  std::int64_t index_of(const std::string& label) const;  // throws if absent
  const std::string& label_of(std::int64_t index) const;
  bool contains(const std::string& label) const;
  std::int64_t size() const { return static_cast<std::int64_t>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  // Index of the label spelled "neutral", when present.
  std::optional<std::int64_t> neutral_index() const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::int64_t> index_;
};

// Token <-> index mapping with reserved PAD=0 and UNK=1. Built from the train
// split only; kept tokens are ordered by descending frequency, ties broken by
// token text, so the mapping is a pure function of the split.
class Vocabulary {
 public:
  static constexpr std::int64_t kPad = 0;
  static constexpr std::int64_t kUnk = 1;

  Vocabulary() = default;
  static Vocabulary build(const std::vector<Dialog>& train_split,
                          std::int64_t min_freq = 1);
  static Vocabulary from_tokens(std::vector<std::string> kept_tokens,
                                std::int64_t min_freq);  // checkpoint restore

  std::int64_t index_of(const std::string& token) const;  // UNK when absent
  const std::string& token_of(std::int64_t index) const;
  std::int64_t size() const { return static_cast<std::int64_t>(tokens_.size()); }
  std::int64_t min_freq() const { return min_freq_; }
  // Tokens in index order, including the reserved entries.
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int64_t> index_;
  std::int64_t min_freq_ = 1;
};

struct Corpus {
  std::vector<Dialog> train;
  std::vector<Dialog> dev;
  std::vector<Dialog> test;
  LabelMap da_labels;         // over every split
  LabelMap sentiment_labels;  // over every split
};

// One dialog per line: {"id": str, "utterances": [{"speaker": str|null,
// "tokens": [str], "da": str, "sentiment": str}]}. Malformed lines are
// reported with their line number. require_labels=false (prediction input)
// lets "da"/"sentiment" be absent, leaving those fields empty.
std::vector<Dialog> load_dialog_file(const std::string& path,
                                     bool require_labels = true);

std::string dialogs_to_jsonl(const std::vector<Dialog>& dialogs);
void save_dialog_file(const std::vector<Dialog>& dialogs,
                      const std::string& path);

// Loads a whole corpus. A directory is expected to hold train.jsonl,
// dev.jsonl and test.jsonl; a single file becomes the train split with empty
// dev/test. Label maps cover every split. An empty corpus is an error.
Corpus load_canonical(const std::string& path);

struct EncodedUtterance {
  std::vector<std::int64_t> token_ids;
  std::int64_t da = -1;         // -1 when loaded without labels
  std::int64_t sentiment = -1;
};

struct EncodedDialog {
  std::string id;
  std::vector<EncodedUtterance> utterances;
};

// Token and label indices for one dialog. Unknown tokens map to UNK; an
// unknown label is an error naming the label and the dialog/utterance.
EncodedDialog encode_dialog(const Dialog& dialog, const Vocabulary& vocab,
                            const LabelMap& da_labels,
                            const LabelMap& sentiment_labels);

std::vector<EncodedDialog> encode_split(const std::vector<Dialog>& split,
                                        const Vocabulary& vocab,
                                        const LabelMap& da_labels,
                                        const LabelMap& sentiment_labels);

}  // namespace dcrnet
