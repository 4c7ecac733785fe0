#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chronofact/core.hpp"
#include "chronofact/datagen.hpp"
#include "chronofact/model.hpp"

namespace chronofact {

// Rows are gold labels, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t arity = 2);

  void add(Label gold, Label pred);
  std::size_t at(std::size_t gold, std::size_t pred) const { return counts_[gold * arity_ + pred]; }
  std::size_t arity() const { return arity_; }
  std::size_t total() const;
  std::size_t correct() const;

  // Per-class F1, 0 when the class has no true positives.
  std::vector<double> per_class_f1() const;
  // Unweighted mean over classes that occur among golds or predictions.
  double macro_f1() const;
  // Global-count F1; equals accuracy for single-label data.
  double micro_f1() const;

  std::string to_csv(std::string_view level) const;

 private:
  std::size_t arity_;
  std::vector<std::size_t> counts_;
};

double macro_f1(std::span<const Label> gold, std::span<const Label> pred, std::size_t arity);
double micro_f1(std::span<const Label> gold, std::span<const Label> pred, std::size_t arity);

struct BucketRow {
  std::string axis;    // "events", "expression" or "category"
  std::string bucket;  // "3", "explicit", "overlapping", ...
  std::size_t count = 0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
};

struct MetricsReport {
  std::size_t n = 0;
  std::size_t arity = 2;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<double> per_class_f1;
  ConfusionMatrix claim{2};
  ConfusionMatrix event{2};
  ConfusionMatrix order{2};
  std::vector<BucketRow> buckets;
  double consistency_violation_rate = 0.0;

  std::vector<BucketRow> axis(std::string_view name) const;
  std::string to_json() const;
  // Claim-level table with event-count and event-type columns.
  std::string to_text() const;
  std::string buckets_csv() const;
};

// The claim label implied by the predicted event and order labels of the
// heads that are present. Skipped heads do not vote.
Label implied_label(const VerificationResult& result, const Ablation& ablation);

// Throws ValidationError on an empty input or a record without golds.
MetricsReport compute_metrics(std::span<const DatasetRecord> records, std::span<const VerificationResult> results,
                              std::size_t arity, const Ablation& ablation = {});

// Macro F1 of always predicting the most frequent gold claim label.
double majority_baseline_macro_f1(std::span<const DatasetRecord> records, std::size_t arity);

}  // namespace chronofact
