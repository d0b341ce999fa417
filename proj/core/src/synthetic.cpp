#include "dcrnet/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dcrnet/io_util.hpp"
#include "dcrnet/rng.hpp"

namespace dcrnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kGlue = {
    "the",  "a",    "i",     "you",  "it",   "this", "that",  "is",
    "was",  "be",   "so",    "just", "very", "well", "still", "now",
    "then", "here", "there", "my",   "your", "we",   "they",  "to",
    "of",   "in",   "on",    "for",  "with", "but",  "and",   "or",
    "not",  "too",  "also",  "some", "one",  "about"};
const std::vector<std::string> kPositive = {
    "great",     "good", "love",      "happy", "awesome",
    "nice",      "glad", "wonderful", "enjoy", "amazing",
    "excellent", "cool", "fantastic", "sweet", "fun"};
const std::vector<std::string> kNegative = {
    "bad",      "awful",    "hate",  "sad",           "terrible",
    "angry",    "horrible", "worse", "annoying",      "ugly",
    "gross",    "mad",      "upset", "disappointing", "broken"};
const std::vector<std::string> kWh = {"what", "why",   "how",
                                      "when", "where", "who"};
const std::vector<std::string> kStatementCue = {"think",  "believe", "reckon",
                                                "guess",  "feel",    "figure"};
const std::vector<std::string> kGreet = {"hello", "hi", "hey", "morning",
                                         "greetings"};
const std::vector<std::string> kThank = {"thanks", "thank", "cheers",
                                         "grateful"};
const std::vector<std::string> kAgreeCue = {"yeah", "yes",    "right",
                                            "agreed", "true", "indeed",
                                            "exactly"};
const std::vector<std::string> kDisagreeCue = {"no",   "nah",    "wrong",
                                               "disagree", "hardly", "nope",
                                               "doubt"};

constexpr std::int64_t kWordPool = 3000;  // filler long tail "w<N>"
constexpr std::int64_t kTestOnlyPool = 600;
constexpr std::int64_t kTargetTrainVocab = 5330;

const std::string& pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[rng.below(pool.size())];
}

struct RawUtterance {
  std::string speaker;
  std::vector<std::string> tokens;
  std::string act;
  std::string sentiment;
};

using RawDialog = std::vector<RawUtterance>;

std::string flip(const std::string& sentiment) {
  if (sentiment == "positive") return "negative";
  if (sentiment == "negative") return "positive";
  return "negative";  // disagreeing with a neutral turn reads negative
}

std::string draw_polarity(Rng& rng) {
  const std::uint64_t u = rng.below(10);
  if (u < 4) return "positive";
  if (u < 8) return "negative";
  return "neutral";
}

void add_fillers(std::vector<std::string>& tokens, Rng& rng, bool test_split) {
  const std::uint64_t n = 2 + rng.below(4);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    if (test_split && u < 0.08) {
      tokens.push_back("z" + std::to_string(rng.below(kTestOnlyPool)));
    } else if (u < 0.55) {
      tokens.push_back(pick(kGlue, rng));
    } else {
      tokens.push_back("w" + std::to_string(rng.below(kWordPool)));
    }
  }
}

// One utterance for the chosen act. Sentiment and surface form follow the
// corpus rules: agreement copies the previous sentiment, disagreement flips
// it, and exactly one of {act cue, sentiment marker} may be dropped so the
// hidden half is only recoverable via the other task plus context.
RawUtterance make_utterance(const std::string& act,
                            const std::string& prev_sentiment, Rng& rng,
                            bool test_split) {
  RawUtterance utt;
  utt.act = act;
  std::vector<std::string>& tokens = utt.tokens;
  add_fillers(tokens, rng, test_split);

  if (act == "greeting") {
    utt.sentiment = "neutral";
    tokens.push_back(pick(kGreet, rng));
  } else if (act == "thanking") {
    utt.sentiment = "neutral";
    tokens.push_back(pick(kThank, rng));
  } else if (act == "question") {
    utt.sentiment = "neutral";
    tokens.insert(tokens.begin(), pick(kWh, rng));
    tokens.push_back("?");
  } else if (act == "statement" || act == "answer") {
    utt.sentiment = draw_polarity(rng);
    if (act == "statement") tokens.push_back(pick(kStatementCue, rng));
    if (utt.sentiment == "positive") tokens.push_back(pick(kPositive, rng));
    if (utt.sentiment == "negative") tokens.push_back(pick(kNegative, rng));
  } else {  // agreement / disagreement
    const bool agree = act == "agreement";
    utt.sentiment = agree ? prev_sentiment : flip(prev_sentiment);
    const double r = rng.uniform();
    const bool drop_marker = r < 0.45;  // sentiment hidden, cue present
    const bool drop_cue = !drop_marker && r < 0.75;
    if (!drop_cue) {
      tokens.push_back(agree ? pick(kAgreeCue, rng) : pick(kDisagreeCue, rng));
    }
    if (!drop_marker) {
      if (utt.sentiment == "positive") tokens.push_back(pick(kPositive, rng));
      if (utt.sentiment == "negative") tokens.push_back(pick(kNegative, rng));
    }
  }
  return utt;
}

std::string next_act(const std::string& prev_act, bool first, bool last,
                     Rng& rng) {
  if (first) {
    const double u = rng.uniform();
    if (u < 0.30) return "greeting";
    if (u < 0.78) return "statement";
    return "question";
  }
  if (last && rng.uniform() < 0.20) return "thanking";
  if (prev_act == "question") {
    return rng.uniform() < 0.85 ? "answer" : "statement";
  }
  if (prev_act == "greeting" || prev_act == "thanking") {
    return rng.uniform() < 0.62 ? "statement" : "question";
  }
  const double u = rng.uniform();
  if (u < 0.22) return "agreement";
  if (u < 0.42) return "disagreement";
  if (u < 0.72) return "statement";
  if (u < 0.90) return "question";
  return "statement";
}

RawDialog make_dialog(std::int64_t length, Rng& rng, bool test_split) {
  RawDialog dialog;
  std::string prev_act;
  std::string prev_sentiment = "neutral";
  for (std::int64_t i = 0; i < length; ++i) {
    const std::string act =
        next_act(prev_act, i == 0, i == length - 1, rng);
    RawUtterance utt = make_utterance(act, prev_sentiment, rng, test_split);
    utt.speaker = (i % 2 == 0) ? "A" : "B";
    prev_act = act;
    prev_sentiment = utt.sentiment;
    dialog.push_back(std::move(utt));
  }
  return dialog;
}

// counts[k] dialogs of length k+3, deterministically interleaved.
std::vector<std::int64_t> make_lengths(const std::vector<std::int64_t>& counts,
                                       Rng& rng) {
  std::vector<std::int64_t> lengths;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    lengths.insert(lengths.end(), counts[k], static_cast<std::int64_t>(k + 3));
  }
  rng.shuffle(lengths);
  return lengths;
}

// Prepends fresh single-use tokens across the first `dialog_count` dialogs
// until they hold exactly `target` distinct tokens. Prepending keeps the
// informative material at the positions the encoder reads most directly.
void pad_vocabulary(std::vector<RawDialog>& dialogs, std::size_t dialog_count,
                    std::int64_t target) {
  std::set<std::string> seen;
  for (std::size_t d = 0; d < dialog_count; ++d) {
    for (const RawUtterance& utt : dialogs[d]) {
      seen.insert(utt.tokens.begin(), utt.tokens.end());
    }
  }
  std::int64_t missing = target - static_cast<std::int64_t>(seen.size());
  if (missing < 0) {
    throw std::logic_error("fixture grew past the vocabulary target by " +
                           std::to_string(-missing));
  }
  std::int64_t counter = 0;
  while (missing > 0) {
    for (std::size_t d = 0; d < dialog_count && missing > 0; ++d) {
      for (RawUtterance& utt : dialogs[d]) {
        if (missing == 0) break;
        utt.tokens.insert(utt.tokens.begin(),
                          "x" + std::to_string(counter++));
        --missing;
      }
    }
  }
}

json to_json(const std::vector<RawDialog>& dialogs) {
  json root = json::array();
  for (const RawDialog& dialog : dialogs) {
    json jd = json::array();
    for (const RawUtterance& utt : dialog) {
      std::ostringstream text;
      for (std::size_t i = 0; i < utt.tokens.size(); ++i) {
        if (i) text << ' ';
        text << utt.tokens[i];
      }
      jd.push_back({{"speaker", utt.speaker},
                    {"utterance", text.str()},
                    {"act", utt.act},
                    {"sentiment", utt.sentiment}});
    }
    root.push_back(std::move(jd));
  }
  return root;
}

}  // namespace

void write_source_fixture(const std::string& dst_dir, std::uint64_t seed) {
  Rng rng(seed);
  // 61*3 + 148*4 + 60*5 = 1075 utterances over 269 dialogs;
  // 10*3 + 168*4 + 88*5 = 1142 over 266.
  const std::vector<std::int64_t> train_lengths =
      make_lengths({61, 148, 60}, rng);
  const std::vector<std::int64_t> test_lengths =
      make_lengths({10, 168, 88}, rng);

  std::vector<RawDialog> train;
  train.reserve(train_lengths.size());
  for (std::int64_t len : train_lengths) {
    train.push_back(make_dialog(len, rng, false));
  }
  std::vector<RawDialog> test;
  test.reserve(test_lengths.size());
  for (std::int64_t len : test_lengths) {
    test.push_back(make_dialog(len, rng, true));
  }

  // The converter will carve the trailing 10% of train dialogs into dev;
  // the vocabulary statistic applies to what remains.
  const std::size_t post_carve = train.size() - (train.size() + 5) / 10;
  pad_vocabulary(train, post_carve, kTargetTrainVocab);

  fs::create_directories(dst_dir);
  const fs::path dir(dst_dir);
  atomic_write_file((dir / "train.json").string(), to_json(train).dump(1));
  atomic_write_file((dir / "test.json").string(), to_json(test).dump(1));
}

std::vector<Dialog> toy_dialogs() {
  auto utt = [](std::vector<std::string> tokens, const char* da,
                const char* sentiment, const char* speaker) {
    Utterance u;
    u.tokens = std::move(tokens);
    u.da = da;
    u.sentiment = sentiment;
    u.speaker = speaker;
    return u;
  };
  Dialog first;
  first.id = "toy-0";
  first.utterances = {
      utt({"hello", "there"}, "greeting", "neutral", "A"),
      utt({"i", "love", "this"}, "statement", "positive", "B"),
      utt({"yes", "agreed"}, "agreement", "positive", "A"),
  };
  Dialog second;
  second.id = "toy-1";
  second.utterances = {
      utt({"why", "is", "that", "?"}, "question", "neutral", "A"),
      utt({"it", "was", "awful"}, "answer", "negative", "B"),
      utt({"no", "wrong"}, "disagreement", "positive", "A"),
  };
  return {first, second};
}

void write_toy_canonical(const std::string& dst_dir) {
  fs::create_directories(dst_dir);
  const fs::path dir(dst_dir);
  const std::vector<Dialog> dialogs = toy_dialogs();
  save_dialog_file(dialogs, (dir / "train.jsonl").string());
  save_dialog_file(dialogs, (dir / "dev.jsonl").string());
  save_dialog_file(dialogs, (dir / "test.jsonl").string());
}

}  // namespace dcrnet
