#include "dcrnet/converters.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "dcrnet/io_util.hpp"

namespace dcrnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' ||
         c == '_' || c >= 0x80;
}

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::string dialog_id(const char* split, std::size_t index) {
  std::ostringstream os;
  os << split << "-" << std::setw(4) << std::setfill('0') << index;
  return os.str();
}

std::set<std::string> distinct_tokens(const std::vector<Dialog>& split) {
  std::set<std::string> tokens;
  for (const Dialog& d : split)
    for (const Utterance& u : d.utterances)
      tokens.insert(u.tokens.begin(), u.tokens.end());
  return tokens;
}

void fill_stats_split(const std::vector<Dialog>& split, std::int64_t& dialogs,
                      std::int64_t& utterances) {
  dialogs = static_cast<std::int64_t>(split.size());
  utterances = 0;
  for (const Dialog& d : split)
    utterances += static_cast<std::int64_t>(d.utterances.size());
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream chunks(text);
  std::string chunk;
  while (chunks >> chunk) {
    std::string lowered;
    lowered.reserve(chunk.size());
    for (unsigned char c : chunk) {
      lowered.push_back(
          (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
    if (starts_with(lowered, "http://") || starts_with(lowered, "https://") ||
        starts_with(lowered, "www.")) {
      tokens.push_back("<url>");
      continue;
    }
    std::string run;
    for (std::size_t i = 0; i < lowered.size(); ++i) {
      const unsigned char c = lowered[i];
      if (is_word_char(c)) {
        run.push_back(lowered[i]);
      } else if ((c == '@' || c == '#') && run.empty() &&
                 i + 1 < lowered.size() &&
                 is_word_char(static_cast<unsigned char>(lowered[i + 1]))) {
        run.push_back(lowered[i]);
      } else {
        if (!run.empty()) tokens.push_back(std::move(run));
        run.clear();
        tokens.push_back(std::string(1, lowered[i]));
      }
    }
    if (!run.empty()) tokens.push_back(std::move(run));
  }
  return tokens;
}

std::int64_t dev_carve_size(std::int64_t train_dialogs) {
  return std::max<std::int64_t>(1, (train_dialogs + 5) / 10);
}

namespace {

std::vector<Dialog> read_mastodon_file(const std::string& path,
                                       const char* split) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": parse error: " + e.what());
  }
  if (!root.is_array() || root.empty()) {
    throw std::runtime_error(path + ": expected a non-empty array of dialogs");
  }
  std::vector<Dialog> dialogs;
  for (std::size_t di = 0; di < root.size(); ++di) {
    const json& jd = root[di];
    if (!jd.is_array() || jd.empty()) {
      throw std::runtime_error(path + ": dialog " + std::to_string(di) +
                               " is not a non-empty array");
    }
    Dialog dialog;
    dialog.id = dialog_id(split, di);
    for (std::size_t ui = 0; ui < jd.size(); ++ui) {
      const json& ju = jd[ui];
      const std::string where = path + ": dialog " + std::to_string(di) +
                                " utterance " + std::to_string(ui);
      if (!ju.is_object() || !ju.contains("utterance") ||
          !ju.contains("act") || !ju.contains("sentiment")) {
        throw std::runtime_error(
            where + ": needs \"utterance\", \"act\" and \"sentiment\"");
      }
      Utterance utt;
      utt.tokens = tokenize(ju.at("utterance").get<std::string>());
      if (utt.tokens.empty()) utt.tokens.push_back("<empty>");
      utt.da = ju.at("act").get<std::string>();
      utt.sentiment = ju.at("sentiment").get<std::string>();
      if (ju.contains("speaker") && ju.at("speaker").is_string()) {
        utt.speaker = ju.at("speaker").get<std::string>();
      }
      dialog.utterances.push_back(std::move(utt));
    }
    dialogs.push_back(std::move(dialog));
  }
  return dialogs;
}

void write_outputs(const std::vector<Dialog>& train,
                   const std::vector<Dialog>& dev,
                   const std::vector<Dialog>& test,
                   const std::string& dst_dir, const std::string& notes,
                   ConversionStats& stats) {
  fs::create_directories(dst_dir);
  const fs::path dir(dst_dir);
  save_dialog_file(train, (dir / "train.jsonl").string());
  save_dialog_file(dev, (dir / "dev.jsonl").string());
  save_dialog_file(test, (dir / "test.jsonl").string());
  atomic_write_file((dir / "CONVERSION.txt").string(), notes);
  fill_stats_split(train, stats.train_dialogs, stats.train_utterances);
  fill_stats_split(dev, stats.dev_dialogs, stats.dev_utterances);
  fill_stats_split(test, stats.test_dialogs, stats.test_utterances);
  stats.distinct_train_tokens =
      static_cast<std::int64_t>(distinct_tokens(train).size());
}

}  // namespace

ConversionStats convert_mastodon(const std::string& src_dir,
                                 const std::string& dst_dir) {
  const fs::path src(src_dir);
  std::vector<Dialog> full_train =
      read_mastodon_file((src / "train.json").string(), "train");
  std::vector<Dialog> test =
      read_mastodon_file((src / "test.json").string(), "test");

  const std::int64_t n_dev =
      dev_carve_size(static_cast<std::int64_t>(full_train.size()));
  if (n_dev >= static_cast<std::int64_t>(full_train.size())) {
    throw std::runtime_error("train split too small to carve a dev set");
  }
  std::vector<Dialog> dev(full_train.end() - n_dev, full_train.end());
  full_train.resize(full_train.size() - static_cast<std::size_t>(n_dev));
  for (std::size_t i = 0; i < dev.size(); ++i) {
    dev[i].id = dialog_id("dev", i);
  }

  ConversionStats stats;
  std::ostringstream notes;
  notes << "Conversion notes\n"
        << "================\n"
        << "Source: train.json / test.json arrays of dialogs.\n"
        << "Dev split: the source has none, so the last "
        << n_dev << " of " << (full_train.size() + dev.size())
        << " train dialogs (file order) were moved to dev.\n"
        << "Tokenization: lowercased; whitespace-delimited chunks starting\n"
        << "with http://, https:// or www. become <url>; runs of\n"
        << "[a-z0-9'_] and non-ASCII bytes form tokens, with a leading @ or\n"
        << "# kept attached (mentions, hashtags); every other character is\n"
        << "emitted as a single-character token. Empty posts become the\n"
        << "token <empty>.\n"
        << "Labels: \"act\" and \"sentiment\" strings are passed through\n"
        << "unchanged.\n";
  write_outputs(full_train, dev, test, dst_dir, notes.str(), stats);
  return stats;
}

namespace {

const char* kDailyActs[] = {"inform", "question", "directive", "commissive"};
const char* kDailyEmotions[] = {"neutral",   "anger",   "disgust", "fear",
                                "happiness", "sadness", "surprise"};

std::string find_daily_file(const fs::path& src, const char* split,
                            const std::string& stem) {
  // official zip nests per-split directories; accept a flat layout too
  const fs::path nested = src / split / (stem + "_" + split + ".txt");
  if (fs::exists(nested)) return nested.string();
  const fs::path flat = src / (stem + "_" + split + ".txt");
  if (fs::exists(flat)) return flat.string();
  throw std::runtime_error("cannot find " + stem + "_" + split +
                           ".txt under " + src.string());
}

std::vector<std::string> split_eou(const std::string& line) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = line.find("__eou__", pos);
    if (hit == std::string::npos) {
      std::string tail = line.substr(pos);
      if (tail.find_first_not_of(" \t\r") != std::string::npos)
        parts.push_back(tail);
      break;
    }
    parts.push_back(line.substr(pos, hit - pos));
    pos = hit + 7;
  }
  return parts;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (in >> field) fields.push_back(field);
  return fields;
}

std::vector<Dialog> read_daily_split(const fs::path& src, const char* split,
                                     const char* id_prefix) {
  std::ifstream text(find_daily_file(src, split, "dialogues"));
  std::ifstream acts(find_daily_file(src, split, "dialogues_act"));
  std::ifstream emotions(find_daily_file(src, split, "dialogues_emotion"));
  std::vector<Dialog> dialogs;
  std::string text_line, act_line, emo_line;
  std::size_t line_no = 0;
  while (std::getline(text, text_line)) {
    ++line_no;
    if (!std::getline(acts, act_line) || !std::getline(emotions, emo_line)) {
      throw std::runtime_error(std::string(split) +
                               ": act/emotion files end before line " +
                               std::to_string(line_no));
    }
    if (text_line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> utts = split_eou(text_line);
    const std::vector<std::string> act_ids = split_fields(act_line);
    const std::vector<std::string> emo_ids = split_fields(emo_line);
    const std::string where =
        std::string(split) + " line " + std::to_string(line_no);
    if (utts.size() != act_ids.size() || utts.size() != emo_ids.size()) {
      throw std::runtime_error(where + ": " + std::to_string(utts.size()) +
                               " utterances vs " +
                               std::to_string(act_ids.size()) + " acts and " +
                               std::to_string(emo_ids.size()) + " emotions");
    }
    Dialog dialog;
    dialog.id = dialog_id(id_prefix, dialogs.size());
    for (std::size_t i = 0; i < utts.size(); ++i) {
      Utterance utt;
      utt.tokens = tokenize(utts[i]);
      if (utt.tokens.empty()) utt.tokens.push_back("<empty>");
      const long act = std::strtol(act_ids[i].c_str(), nullptr, 10);
      const long emo = std::strtol(emo_ids[i].c_str(), nullptr, 10);
      if (act < 1 || act > 4) {
        throw std::runtime_error(where + ": act id " + act_ids[i] +
                                 " outside 1..4");
      }
      if (emo < 0 || emo > 6) {
        throw std::runtime_error(where + ": emotion id " + emo_ids[i] +
                                 " outside 0..6");
      }
      utt.da = kDailyActs[act - 1];
      utt.sentiment = kDailyEmotions[emo];
      utt.speaker = (i % 2 == 0) ? "A" : "B";
      dialog.utterances.push_back(std::move(utt));
    }
    dialogs.push_back(std::move(dialog));
  }
  if (dialogs.empty()) {
    throw std::runtime_error(std::string(split) + ": no dialogs found");
  }
  return dialogs;
}

}  // namespace

ConversionStats convert_dailydialog(const std::string& src_dir,
                                    const std::string& dst_dir) {
  const fs::path src(src_dir);
  std::vector<Dialog> train = read_daily_split(src, "train", "train");
  std::vector<Dialog> dev = read_daily_split(src, "validation", "dev");
  std::vector<Dialog> test = read_daily_split(src, "test", "test");

  ConversionStats stats;
  std::ostringstream notes;
  notes << "Conversion notes\n"
        << "================\n"
        << "Source: dialogues_<split>.txt with __eou__ separators plus\n"
        << "parallel act and emotion digit files; the official validation\n"
        << "split becomes dev.\n"
        << "Act ids 1-4 map to inform/question/directive/commissive;\n"
        << "emotion ids 0-6 map to neutral/anger/disgust/fear/happiness/\n"
        << "sadness/surprise. Speakers alternate A/B by turn.\n"
        << "Tokenization: same scheme as the Mastodon conversion\n"
        << "(lowercase, <url> collapsing, punctuation as single tokens).\n";
  write_outputs(train, dev, test, dst_dir, notes.str(), stats);
  return stats;
}

}  // namespace dcrnet
