#include "dcrnet/metrics.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dcrnet {

namespace {

void require_same_length(const std::vector<std::int64_t>& gold,
                         const std::vector<std::int64_t>& pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument(
        "metrics: " + std::to_string(gold.size()) + " gold labels vs " +
        std::to_string(pred.size()) + " predictions");
  }
}

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<LabelScore> score_labels(const ConfusionCounts& counts) {
  std::vector<LabelScore> scores;
  scores.reserve(static_cast<std::size_t>(counts.num_labels()));
  for (std::int64_t label = 0; label < counts.num_labels(); ++label) {
    const std::size_t i = static_cast<std::size_t>(label);
    LabelScore score;
    score.label = std::to_string(label);
    score.tp = counts.tp[i];
    score.fp = counts.fp[i];
    score.fn = counts.fn[i];
    score.gold_count = counts.gold_count[i];
    const double p = ratio(counts.tp[i], counts.tp[i] + counts.fp[i]);
    const double r = ratio(counts.tp[i], counts.tp[i] + counts.fn[i]);
    score.precision = 100.0 * p;
    score.recall = 100.0 * r;
    score.f1 = 100.0 * f1_of(p, r);
    scores.push_back(score);
  }
  return scores;
}

}  // namespace

ConfusionCounts ConfusionCounts::over(const std::vector<std::int64_t>& gold,
                                      const std::vector<std::int64_t>& pred,
                                      std::int64_t num_labels) {
  require_same_length(gold, pred);
  ConfusionCounts counts;
  counts.tp.assign(static_cast<std::size_t>(num_labels), 0);
  counts.fp.assign(static_cast<std::size_t>(num_labels), 0);
  counts.fn.assign(static_cast<std::size_t>(num_labels), 0);
  counts.gold_count.assign(static_cast<std::size_t>(num_labels), 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::int64_t g = gold[i], p = pred[i];
    if (g < 0 || g >= num_labels || p < 0 || p >= num_labels) {
      throw std::out_of_range("metrics: label index out of range at position " +
                              std::to_string(i));
    }
    ++counts.gold_count[static_cast<std::size_t>(g)];
    if (g == p) {
      ++counts.tp[static_cast<std::size_t>(g)];
    } else {
      ++counts.fn[static_cast<std::size_t>(g)];
      ++counts.fp[static_cast<std::size_t>(p)];
    }
  }
  return counts;
}

EvalReport macro_prf(const std::vector<std::int64_t>& gold,
                     const std::vector<std::int64_t>& pred,
                     std::int64_t num_labels, std::int64_t exclude) {
  ConfusionCounts counts = ConfusionCounts::over(gold, pred, num_labels);
  EvalReport report;
  report.scheme = "macro";
  report.per_label = score_labels(counts);
  std::int64_t included = 0;
  for (std::int64_t label = 0; label < num_labels; ++label) {
    LabelScore& score = report.per_label[static_cast<std::size_t>(label)];
    if (label == exclude) {
      score.excluded = true;
      continue;
    }
    report.precision += score.precision;
    report.recall += score.recall;
    report.f1 += score.f1;
    ++included;
  }
  if (included > 0) {
    report.precision /= included;
    report.recall /= included;
    report.f1 /= included;
  }
  return report;
}

EvalReport prevalence_weighted_f1(const std::vector<std::int64_t>& gold,
                                  const std::vector<std::int64_t>& pred,
                                  std::int64_t num_labels) {
  ConfusionCounts counts = ConfusionCounts::over(gold, pred, num_labels);
  EvalReport report;
  report.scheme = "prevalence_weighted";
  report.per_label = score_labels(counts);
  const double total = static_cast<double>(gold.size());
  if (total == 0.0) return report;
  for (const LabelScore& score : report.per_label) {
    const double weight = static_cast<double>(score.gold_count) / total;
    report.precision += weight * score.precision;
    report.recall += weight * score.recall;
    report.f1 += weight * score.f1;
  }
  return report;
}

void drop_gold_label(std::vector<std::int64_t>& gold,
                     std::vector<std::int64_t>& pred, std::int64_t label) {
  require_same_length(gold, pred);
  std::size_t keep = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == label) continue;
    gold[keep] = gold[i];
    pred[keep] = pred[i];
    ++keep;
  }
  gold.resize(keep);
  pred.resize(keep);
}

void name_labels(EvalReport& report, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < report.per_label.size() && i < names.size();
       ++i) {
    report.per_label[i].label = names[i];
  }
}

std::string report_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["task"] = report.task;
  doc["scheme"] = report.scheme;
  doc["f1"] = report.f1;
  doc["recall"] = report.recall;
  doc["precision"] = report.precision;
  doc["per_label"] = nlohmann::json::array();
  for (const LabelScore& score : report.per_label) {
    nlohmann::json row;
    row["label"] = score.label;
    row["f1"] = score.f1;
    row["recall"] = score.recall;
    row["precision"] = score.precision;
    row["gold_count"] = score.gold_count;
    row["excluded"] = score.excluded;
    doc["per_label"].push_back(row);
  }
  return doc.dump();
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  out << report.task << " (" << report.scheme << ")\n";
  out << std::fixed << std::setprecision(2);
  out << "  overall: F1 " << report.f1 << "  R " << report.recall << "  P "
      << report.precision << "\n";
  for (const LabelScore& score : report.per_label) {
    out << "  " << std::setw(14) << std::left << score.label << std::right
        << " F1 " << std::setw(6) << score.f1 << "  R " << std::setw(6)
        << score.recall << "  P " << std::setw(6) << score.precision
        << "  n=" << score.gold_count;
    if (score.excluded) out << "  (excluded from average)";
    out << "\n";
  }
  return out.str();
}

}  // namespace dcrnet
