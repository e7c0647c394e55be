#include "fnt/evaluate.hpp"

#include <map>
#include <string>

#include "fnt/error.hpp"

namespace fnt {

namespace {

[[noreturn, gnu::noinline, gnu::cold]] void throw_length_mismatch(std::size_t predictions, std::size_t gold) {
  throw ShapeError("predictions (" + std::to_string(predictions) + ") and gold (" + std::to_string(gold) +
                   ") differ in length");
}

void check_shapes(std::span<const TypeSet> predictions, std::span<const TypeSet> gold) {
  if (predictions.size() != gold.size()) [[unlikely]]
    throw_length_mismatch(predictions.size(), gold.size());
}

ConfusionCounts pair_counts(const TypeSet& pred, const TypeSet& gold) {
  const auto both = pred.intersection_count(gold);
  return {both, pred.count() - both, gold.count() - both};
}

}  // namespace

ConfusionCounts confusion_counts(std::span<const TypeSet> predictions, std::span<const TypeSet> gold) {
  check_shapes(predictions, gold);
  std::uint64_t tp = 0, predicted = 0, actual = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    tp += predictions[i].intersection_count(gold[i]);
    predicted += predictions[i].count();
    actual += gold[i].count();
  }
  return {tp, predicted - tp, actual - tp};
}

double micro_f1(const ConfusionCounts& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double micro_f1(std::span<const TypeSet> predictions, std::span<const TypeSet> gold) {
  return micro_f1(confusion_counts(predictions, gold));
}

double strict_accuracy(std::span<const TypeSet> predictions, std::span<const TypeSet> gold) {
  check_shapes(predictions, gold);
  if (gold.empty()) return 0.0;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i].size() != gold[i].size()) throw ShapeError("type sets over different type systems");
    exact += static_cast<std::size_t>(predictions[i] == gold[i]);
  }
  return static_cast<double>(exact) / static_cast<double>(gold.size());
}

std::vector<GroupResult> per_type_count_breakdown(std::span<const TypeSet> predictions,
                                                  std::span<const TypeSet> gold, std::size_t min_group) {
  check_shapes(predictions, gold);
  std::map<std::size_t, GroupResult> groups;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto n = gold[i].count();
    auto& g = groups[n];
    g.n = n;
    ++g.size;
    g.counts += pair_counts(predictions[i], gold[i]);
  }
  std::vector<GroupResult> out;
  for (auto& [n, g] : groups) {
    if (g.size <= min_group) continue;
    g.micro_f1 = micro_f1(g.counts);
    out.push_back(g);
  }
  return out;
}

EvalReport evaluate_predictions(std::span<const TypeSet> predictions, std::span<const TypeSet> gold,
                                std::size_t excluded_names, std::size_t min_group) {
  EvalReport r;
  r.counts = confusion_counts(predictions, gold);
  r.micro_f1 = micro_f1(r.counts);
  r.acc = strict_accuracy(predictions, gold);
  r.per_n_breakdown = per_type_count_breakdown(predictions, gold, min_group);
  r.examples = gold.size();
  r.excluded_names = excluded_names;
  return r;
}

}  // namespace fnt
