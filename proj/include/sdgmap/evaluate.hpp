#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sdgmap/errors.hpp"

namespace sdgmap {

// Per-publication goal label sets; labels[i] belongs to publication_ids[i].
struct LabelMatrix {
  std::vector<std::string> publication_ids;
  std::vector<std::set<int>> labels;

  // Checks parallel shape, unique ids, and goal range 1..17.
  void validate() const;
};

struct AlignResult {
  LabelMatrix predicted;
  LabelMatrix actual;
  std::size_t dropped_predicted = 0;  // ids only the predicted side had
  std::size_t dropped_actual = 0;     // ids only the actual side had
};

// Restricts both matrices to the shared publication ids in ascending id
// order. Throws EmptyOverlap when the sides share no id.
AlignResult align(const LabelMatrix& predicted, const LabelMatrix& actual);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

// Requires aligned matrices (identical id sequences).
std::map<int, ConfusionCounts> per_label_confusion(const LabelMatrix& predicted,
                                                   const LabelMatrix& actual);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// precision = tp/(tp+fp), recall = tp/(tp+fn), each 0 on a zero denominator;
// f1 is their harmonic mean, 0 when both are 0.
Prf prf(const ConfusionCounts& c);

struct MetricRow {
  std::string label;  // "SDG1".."SDG17" or an average name
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ReportOptions {
  // When set, samples with an empty prediction set are left out of the
  // samples average instead of contributing zero precision.
  bool skip_empty_predictions = false;
};

// 17 per-goal rows followed by the micro, macro, weighted, and samples
// averages. Zero-support goals contribute zero metrics to the macro average
// and zero weight to the weighted average. Weighted recall is computed from
// the summed integer counts, so it equals micro recall exactly.
std::vector<MetricRow> classification_report(const LabelMatrix& predicted,
                                             const LabelMatrix& actual,
                                             const ReportOptions& options = {});

// CSV with header label,precision,recall,f1,support; metrics at 6 decimals.
std::string report_csv(std::span<const MetricRow> rows);
void write_report_csv(const std::filesystem::path& path,
                      std::span<const MetricRow> rows);

}  // namespace sdgmap
