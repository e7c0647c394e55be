#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fnt/type_system.hpp"

namespace fnt {

// Pooled (example, type) decision counts.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// All functions below throw ShapeError when the prediction and gold lists
// differ in length or a pair of sets differs in width.
ConfusionCounts confusion_counts(std::span<const TypeSet> predictions, std::span<const TypeSet> gold);

// 2TP / (2TP + FP + FN); 0 when there are no positives on either side.
double micro_f1(const ConfusionCounts& counts);
double micro_f1(std::span<const TypeSet> predictions, std::span<const TypeSet> gold);

// Fraction of examples whose predicted set equals the gold set exactly.
// Empty input yields 0.
double strict_accuracy(std::span<const TypeSet> predictions, std::span<const TypeSet> gold);

struct GroupResult {
  std::size_t n = 0;     // number of gold types
  std::size_t size = 0;  // examples in the group
  ConfusionCounts counts;
  double micro_f1 = 0.0;
};

// Groups examples by gold-set size, keeping groups with size > min_group,
// ordered by n.
std::vector<GroupResult> per_type_count_breakdown(std::span<const TypeSet> predictions,
                                                  std::span<const TypeSet> gold,
                                                  std::size_t min_group = 100);

struct EvalReport {
  double acc = 0.0;
  double micro_f1 = 0.0;
  ConfusionCounts counts;
  std::vector<GroupResult> per_n_breakdown;
  std::size_t examples = 0;
  // Test names without an embedding, scored as empty predictions.
  std::size_t excluded_names = 0;
};

EvalReport evaluate_predictions(std::span<const TypeSet> predictions, std::span<const TypeSet> gold,
                                std::size_t excluded_names = 0, std::size_t min_group = 100);

}  // namespace fnt
