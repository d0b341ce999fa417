#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcrnet {

// Per-label confusion tallies over one split.
struct ConfusionCounts {
  std::vector<std::int64_t> tp, fp, fn;
  std::vector<std::int64_t> gold_count;

  static ConfusionCounts over(const std::vector<std::int64_t>& gold,
                              const std::vector<std::int64_t>& pred,
                              std::int64_t num_labels);
  std::int64_t num_labels() const {
    return static_cast<std::int64_t>(tp.size());
  }
};

struct LabelScore {
  std::string label;
  std::int64_t tp = 0, fp = 0, fn = 0;
  std::int64_t gold_count = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // percentages
  bool excluded = false;  // outside the averaged label set
};

struct EvalReport {
  std::string task;
  std::string scheme;  // "macro" | "prevalence_weighted"
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // percentages
  std::vector<LabelScore> per_label;
};

// Unweighted mean of per-label precision/recall/F1 over every label except
// `exclude` (pass a negative index to average over all labels). Division by
// zero yields 0 at every level. Utterances whose gold carries the excluded
// label still enter the other labels' confusion counts.
EvalReport macro_prf(const std::vector<std::int64_t>& gold,
                     const std::vector<std::int64_t>& pred,
                     std::int64_t num_labels, std::int64_t exclude = -1);

// Per-label F1 averaged with weights gold_count/N; precision and recall are
// weighted the same way so the report stays comparable.
EvalReport prevalence_weighted_f1(const std::vector<std::int64_t>& gold,
                                  const std::vector<std::int64_t>& pred,
                                  std::int64_t num_labels);

// The stricter exclusion reading: positions whose gold equals `label` are
// dropped from both sequences before any counting.
void drop_gold_label(std::vector<std::int64_t>& gold,
                     std::vector<std::int64_t>& pred, std::int64_t label);

// Attaches label names to the per-label rows (defaults are the indices).
void name_labels(EvalReport& report, const std::vector<std::string>& names);

std::string report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

}  // namespace dcrnet
