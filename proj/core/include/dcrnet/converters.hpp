#pragma once

#include <string>
#include <vector>

#include "dcrnet/corpus.hpp"

namespace dcrnet {

// Lowercasing, punctuation-preserving tokenizer used by both converters.
// Rules: whitespace-delimited chunks beginning with http://, https:// or
// www. collapse to "<url>"; ASCII letters are lowercased; runs of
// [a-z0-9'_] (plus non-ASCII bytes, so UTF-8 stays glued) form one token,
// optionally led by @ or #; every other character is its own token.
std::vector<std::string> tokenize(const std::string& text);

struct ConversionStats {
  std::int64_t train_dialogs = 0, dev_dialogs = 0, test_dialogs = 0;
  std::int64_t train_utterances = 0, dev_utterances = 0,
               test_utterances = 0;
  std::int64_t distinct_train_tokens = 0;  // post-carve train split
};

// Reads <src>/train.json and <src>/test.json (each a JSON array of dialogs;
// a dialog is an array of {"utterance", "act", "sentiment"[, "speaker"]}),
// carves the last ~10% of train dialogs (file order) into a dev split, and
// writes train/dev/test.jsonl plus CONVERSION.txt under dst_dir.
ConversionStats convert_mastodon(const std::string& src_dir,
                                 const std::string& dst_dir);

// Reads the official layout: dialogues_<split>.txt with __eou__ utterance
// separators plus parallel dialogues_act_<split>.txt and
// dialogues_emotion_<split>.txt digit files, under <src>/{train,validation,
// test}/ or flat. Acts 1-4 become inform/question/directive/commissive;
// emotions 0-6 become neutral/anger/disgust/fear/happiness/sadness/surprise.
ConversionStats convert_dailydialog(const std::string& src_dir,
                                    const std::string& dst_dir);

// How many trailing train dialogs the Mastodon converter moves into dev.
std::int64_t dev_carve_size(std::int64_t train_dialogs);

}  // namespace dcrnet
