#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcrnet/corpus.hpp"

namespace dcrnet {

// Writes a Mastodon-shaped source corpus (train.json / test.json arrays of
// {"speaker","utterance","act","sentiment"} dialogs) whose size matches the
// published statistics: 269 train dialogs / 1075 utterances, 266 test
// dialogs / 1142 utterances, and exactly 5330 distinct tokens in the train
// split that remains after the converter carves its dev set.
//
// The labels are built to reward cross-task and cross-utterance modeling:
// agreement/disagreement utterances copy or flip the previous utterance's
// sentiment, and either their act cue or their sentiment marker (never both)
// is dropped with fixed probability, so one task's hidden label is
// recoverable only through the other task plus dialog context.
void write_source_fixture(const std::string& dst_dir,
                          std::uint64_t seed = 20240817);

// Two tiny fully-learnable dialogs for overfitting sanity checks.
std::vector<Dialog> toy_dialogs();

// Canonical train/dev/test.jsonl (all three = toy_dialogs) under dst_dir.
void write_toy_canonical(const std::string& dst_dir);

}  // namespace dcrnet
