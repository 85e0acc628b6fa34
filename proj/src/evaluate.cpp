#include "sdgmap/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace sdgmap {

namespace {

constexpr int kGoalCount = 17;

void require_aligned(const LabelMatrix& predicted, const LabelMatrix& actual) {
  if (predicted.publication_ids != actual.publication_ids) {
    throw Error("label matrices are not aligned; call align() first");
  }
}

double safe_div(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

void LabelMatrix::validate() const {
  if (publication_ids.size() != labels.size()) {
    throw Error("label matrix ids and labels differ in length");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& id : publication_ids) {
    if (!seen.insert(id).second) {
      throw Error("label matrix repeats publication id \"" + id + "\"");
    }
  }
  for (const std::set<int>& row : labels) {
    for (int goal : row) {
      if (goal < 1 || goal > kGoalCount) {
        throw Error("label matrix holds goal " + std::to_string(goal) +
                    " outside 1..17");
      }
    }
  }
}

AlignResult align(const LabelMatrix& predicted, const LabelMatrix& actual) {
  predicted.validate();
  actual.validate();

  std::unordered_map<std::string, std::size_t> predicted_index;
  for (std::size_t i = 0; i < predicted.publication_ids.size(); ++i) {
    predicted_index[predicted.publication_ids[i]] = i;
  }
  std::unordered_map<std::string, std::size_t> actual_index;
  for (std::size_t i = 0; i < actual.publication_ids.size(); ++i) {
    actual_index[actual.publication_ids[i]] = i;
  }

  std::vector<std::string> common;
  for (const std::string& id : predicted.publication_ids) {
    if (actual_index.contains(id)) common.push_back(id);
  }
  if (common.empty()) {
    throw EmptyOverlap("predicted and actual label matrices share no "
                       "publication id");
  }
  std::sort(common.begin(), common.end());

  AlignResult result;
  result.dropped_predicted = predicted.publication_ids.size() - common.size();
  result.dropped_actual = actual.publication_ids.size() - common.size();
  for (const std::string& id : common) {
    result.predicted.publication_ids.push_back(id);
    result.predicted.labels.push_back(predicted.labels[predicted_index[id]]);
    result.actual.publication_ids.push_back(id);
    result.actual.labels.push_back(actual.labels[actual_index[id]]);
  }
  return result;
}

std::map<int, ConfusionCounts> per_label_confusion(const LabelMatrix& predicted,
                                                   const LabelMatrix& actual) {
  require_aligned(predicted, actual);

  std::map<int, ConfusionCounts> confusion;
  for (int goal = 1; goal <= kGoalCount; ++goal) confusion[goal] = {};

  for (std::size_t i = 0; i < predicted.labels.size(); ++i) {
    const std::set<int>& pred = predicted.labels[i];
    const std::set<int>& act = actual.labels[i];
    for (int goal = 1; goal <= kGoalCount; ++goal) {
      const bool in_pred = pred.contains(goal);
      const bool in_act = act.contains(goal);
      ConfusionCounts& c = confusion[goal];
      if (in_pred && in_act) ++c.tp;
      else if (in_pred) ++c.fp;
      else if (in_act) ++c.fn;
      else ++c.tn;
    }
  }
  return confusion;
}

Prf prf(const ConfusionCounts& c) {
  Prf out;
  out.precision = safe_div(c.tp, c.tp + c.fp);
  out.recall = safe_div(c.tp, c.tp + c.fn);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

std::vector<MetricRow> classification_report(const LabelMatrix& predicted,
                                             const LabelMatrix& actual,
                                             const ReportOptions& options) {
  require_aligned(predicted, actual);
  if (predicted.publication_ids.empty()) {
    throw Error("classification report needs at least one sample");
  }

  const std::map<int, ConfusionCounts> confusion =
      per_label_confusion(predicted, actual);

  std::vector<MetricRow> rows;
  rows.reserve(kGoalCount + 4);

  std::size_t sum_tp = 0, sum_fp = 0, sum_fn = 0;
  double macro_p = 0.0, macro_r = 0.0, macro_f = 0.0;
  double weighted_p = 0.0, weighted_f = 0.0;
  std::size_t total_support = 0;

  for (int goal = 1; goal <= kGoalCount; ++goal) {
    const ConfusionCounts& c = confusion.at(goal);
    const Prf metrics = prf(c);
    const std::size_t support = c.tp + c.fn;

    rows.push_back({"SDG" + std::to_string(goal), metrics.precision,
                    metrics.recall, metrics.f1, support});

    sum_tp += c.tp;
    sum_fp += c.fp;
    sum_fn += c.fn;
    macro_p += metrics.precision;
    macro_r += metrics.recall;
    macro_f += metrics.f1;
    weighted_p += static_cast<double>(support) * metrics.precision;
    weighted_f += static_cast<double>(support) * metrics.f1;
    total_support += support;
  }

  const double micro_p = safe_div(sum_tp, sum_tp + sum_fp);
  const double micro_r = safe_div(sum_tp, sum_tp + sum_fn);
  rows.push_back(
      {"micro avg", micro_p, micro_r, harmonic(micro_p, micro_r), total_support});

  rows.push_back({"macro avg", macro_p / kGoalCount, macro_r / kGoalCount,
                  macro_f / kGoalCount, total_support});

  // Weighted recall from the summed integer counts: Σ support·(tp/support)
  // telescopes to Σtp, so using Σtp/Σsupport keeps the identity with micro
  // recall exact instead of merely close.
  const double weight = static_cast<double>(total_support);
  rows.push_back({"weighted avg",
                  total_support == 0 ? 0.0 : weighted_p / weight,
                  safe_div(sum_tp, total_support),
                  total_support == 0 ? 0.0 : weighted_f / weight,
                  total_support});

  double samples_p = 0.0, samples_r = 0.0, samples_f = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < predicted.labels.size(); ++i) {
    const std::set<int>& pred = predicted.labels[i];
    const std::set<int>& act = actual.labels[i];
    if (options.skip_empty_predictions && pred.empty()) continue;

    std::size_t inter = 0;
    for (int goal : pred) inter += act.contains(goal) ? 1 : 0;
    const double p = pred.empty() ? 0.0 : safe_div(inter, pred.size());
    const double r = act.empty() ? 0.0 : safe_div(inter, act.size());
    samples_p += p;
    samples_r += r;
    samples_f += harmonic(p, r);
    ++counted;
  }
  const double n = counted == 0 ? 1.0 : static_cast<double>(counted);
  rows.push_back({"samples avg", samples_p / n, samples_r / n, samples_f / n,
                  total_support});

  return rows;
}

std::string report_csv(std::span<const MetricRow> rows) {
  std::string out = "label,precision,recall,f1,support\n";
  char buffer[160];
  for (const MetricRow& row : rows) {
    std::snprintf(buffer, sizeof(buffer), "%s,%.6f,%.6f,%.6f,%zu\n",
                  row.label.c_str(), row.precision, row.recall, row.f1,
                  row.support);
    out += buffer;
  }
  return out;
}

void write_report_csv(const std::filesystem::path& path,
                      std::span<const MetricRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open report file for writing: " + path.string());
  }
  out << report_csv(rows);
}

}  // namespace sdgmap
