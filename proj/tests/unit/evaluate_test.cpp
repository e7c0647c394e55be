#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fnt/error.hpp"
#include "fnt/evaluate.hpp"
#include "fnt/report.hpp"
#include "synthetic.hpp"

namespace fnt {
namespace {

TypeSet make(std::size_t width, std::initializer_list<std::size_t> bits) {
  TypeSet s(width);
  for (auto b : bits) s.set(b);
  return s;
}

// Reference implementation: explicit per-decision tallies on plain bools.
struct Tally {
  long tp = 0, fp = 0, fn = 0, exact = 0;
};
Tally brute_force(const std::vector<TypeSet>& pred, const std::vector<TypeSet>& gold) {
  Tally t;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    bool all_equal = true;
    for (std::size_t k = 0; k < gold[i].size(); ++k) {
      const bool p = pred[i].test(k), g = gold[i].test(k);
      if (p && g) ++t.tp;
      if (p && !g) ++t.fp;
      if (!p && g) ++t.fn;
      if (p != g) all_equal = false;
    }
    if (all_equal) ++t.exact;
  }
  return t;
}

TEST(Metrics, WorkedExampleFromTwoNames) {
  // gold a:{t1,t2} b:{t1}; pred a:{t1} b:{t1,t3}
  std::vector<TypeSet> gold{make(3, {0, 1}), make(3, {0})};
  std::vector<TypeSet> pred{make(3, {0}), make(3, {0, 2})};
  EXPECT_DOUBLE_EQ(strict_accuracy(pred, gold), 0.0);
  const auto c = confusion_counts(pred, gold);
  EXPECT_EQ(c, (ConfusionCounts{2, 1, 1}));
  EXPECT_DOUBLE_EQ(micro_f1(pred, gold), 2.0 / 3.0);
}

TEST(Metrics, PerfectAndHalfCorrect) {
  std::vector<TypeSet> gold{make(2, {0}), make(2, {1})};
  EXPECT_DOUBLE_EQ(strict_accuracy(gold, gold), 1.0);
  EXPECT_DOUBLE_EQ(micro_f1(gold, gold), 1.0);
  std::vector<TypeSet> pred{make(2, {0}), make(2, {0})};
  EXPECT_DOUBLE_EQ(strict_accuracy(pred, gold), 0.5);
}

TEST(Metrics, EmptyPredictionsScoreZero) {
  std::vector<TypeSet> gold{make(2, {0}), make(2, {0, 1})};
  std::vector<TypeSet> pred(2, TypeSet(2));
  EXPECT_DOUBLE_EQ(micro_f1(pred, gold), 0.0);
  EXPECT_DOUBLE_EQ(micro_f1(ConfusionCounts{}), 0.0);
}

TEST(Metrics, ShapeMismatchThrows) {
  std::vector<TypeSet> a{make(2, {0})};
  std::vector<TypeSet> b{make(2, {0}), make(2, {1})};
  EXPECT_THROW(strict_accuracy(a, b), ShapeError);
  EXPECT_THROW(micro_f1(a, b), ShapeError);
  std::vector<TypeSet> wide{make(3, {0})};
  EXPECT_THROW(confusion_counts(a, wide), ShapeError);
}

TEST(Metrics, ExhaustiveEnumerationMatchesBruteForce) {
  for (std::size_t types = 1; types <= 3; ++types) {
    const auto sets = testing::all_type_sets(types);
    const std::size_t k = sets.size();
    for (std::size_t examples = 1; examples <= 4; ++examples) {
      // Each example picks a (gold, pred) pair: k*k choices per example.
      std::size_t combos = 1;
      for (std::size_t e = 0; e < examples; ++e) combos *= k * k;
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<TypeSet> gold, pred;
        auto c = code;
        for (std::size_t e = 0; e < examples; ++e) {
          gold.push_back(sets[c % k]);
          c /= k;
          pred.push_back(sets[c % k]);
          c /= k;
        }
        const auto ref = brute_force(pred, gold);
        const double ref_f1 = 2 * ref.tp + ref.fp + ref.fn == 0
                                  ? 0.0
                                  : 2.0 * ref.tp / static_cast<double>(2 * ref.tp + ref.fp + ref.fn);
        ASSERT_EQ(strict_accuracy(pred, gold), static_cast<double>(ref.exact) / static_cast<double>(examples));
        ASSERT_EQ(micro_f1(pred, gold), ref_f1);
      }
    }
  }
}

TEST(Metrics, InvariantUnderExampleOrder) {
  std::mt19937_64 rng(7);
  const auto sets = testing::all_type_sets(4);
  std::vector<TypeSet> gold, pred;
  for (int i = 0; i < 200; ++i) {
    gold.push_back(sets[rng() % sets.size()]);
    pred.push_back(sets[rng() % sets.size()]);
  }
  const double acc = strict_accuracy(pred, gold), f1 = micro_f1(pred, gold);
  std::vector<std::size_t> perm(gold.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<TypeSet> g2, p2;
    for (auto i : perm) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    EXPECT_EQ(strict_accuracy(p2, g2), acc);
    EXPECT_EQ(micro_f1(p2, g2), f1);
  }
}

TEST(Metrics, PerfectAccuracyImpliesPerfectF1) {
  std::mt19937_64 rng(3);
  const auto sets = testing::all_type_sets(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TypeSet> gold;
    for (int i = 0; i < 10; ++i) gold.push_back(sets[1 + rng() % (sets.size() - 1)]);
    ASSERT_EQ(strict_accuracy(gold, gold), 1.0);
    ASSERT_EQ(micro_f1(gold, gold), 1.0);
  }
}

TEST(Breakdown, SingleGroupWhenAllShareCount) {
  std::vector<TypeSet> gold(150, make(3, {0, 2}));
  std::vector<TypeSet> pred(150, make(3, {0}));
  const auto groups = per_type_count_breakdown(pred, gold);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].n, 2u);
  EXPECT_EQ(groups[0].size, 150u);
  EXPECT_DOUBLE_EQ(groups[0].micro_f1, 2.0 / 3.0);
}

TEST(Breakdown, MinGroupIsStrict) {
  std::vector<TypeSet> gold(100, make(2, {0}));
  std::vector<TypeSet> pred = gold;
  EXPECT_TRUE(per_type_count_breakdown(pred, gold, 100).empty());
  EXPECT_EQ(per_type_count_breakdown(pred, gold, 99).size(), 1u);
}

TEST(Breakdown, ZeroMinGroupPartitionsAndAddsUp) {
  std::mt19937_64 rng(11);
  const auto sets = testing::all_type_sets(4);
  std::vector<TypeSet> gold, pred;
  for (int i = 0; i < 500; ++i) {
    gold.push_back(sets[rng() % sets.size()]);
    pred.push_back(sets[rng() % sets.size()]);
  }
  const auto groups = per_type_count_breakdown(pred, gold, 0);
  std::size_t covered = 0;
  ConfusionCounts pooled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    covered += groups[g].size;
    pooled += groups[g].counts;
    if (g) EXPECT_LT(groups[g - 1].n, groups[g].n);
  }
  EXPECT_EQ(covered, gold.size());
  EXPECT_EQ(pooled, confusion_counts(pred, gold));
}

TEST(Evaluate, ReportCarriesExcludedNames) {
  std::vector<TypeSet> gold{make(2, {0}), make(2, {1})};
  std::vector<TypeSet> pred{make(2, {0}), TypeSet(2)};
  const auto r = evaluate_predictions(pred, gold, 1, 0);
  EXPECT_EQ(r.excluded_names, 1u);
  EXPECT_EQ(r.examples, 2u);
  EXPECT_DOUBLE_EQ(r.acc, 0.5);
  EXPECT_DOUBLE_EQ(r.micro_f1, 2.0 / 3.0);
  EXPECT_EQ(r.per_n_breakdown.size(), 1u);
}

ReportRow row(std::string model, std::string clf, double acc, double f1) {
  ReportRow r{std::move(model), std::move(clf), {}};
  r.report.acc = acc;
  r.report.micro_f1 = f1;
  return r;
}

TEST(Report, TsvHasHeaderAndOneRowPerEntry) {
  const auto text =
      render_report({row("sskip", "LR", 0.234, 0.505), row("cbow", "LR", 0.2, 0.4)}, ReportFormat::Tsv);
  EXPECT_EQ(text, "model\tclassifier\tacc\tmicro_f1\nsskip\tLR\t23.4\t50.5\ncbow\tLR\t20.0\t40.0\n");
}

TEST(Report, EmptyRowsRejected) { EXPECT_THROW(render_report({}, ReportFormat::Tsv), ConfigError); }

TEST(Report, HumanTableMarksColumnMaxima) {
  const auto text = render_report({row("skip", "LR", 0.3, 0.6), row("cwin", "LR", 0.4, 0.5)}, ReportFormat::HumanTable);
  EXPECT_NE(text.find("40.0*"), std::string::npos);
  EXPECT_NE(text.find("60.0*"), std::string::npos);
  EXPECT_EQ(text.find("30.0*"), std::string::npos);
  EXPECT_EQ(text.find("50.0*"), std::string::npos);
}

TEST(Report, EmitWritesBreakdownCompanionAndJsonRoundTrips) {
  testing::TempDir dir("report");
  std::vector<TypeSet> gold(3, make(2, {0})), pred(3, make(2, {0}));
  ReportRow r{"skip", "MLP", evaluate_predictions(pred, gold, 0, 0)};
  emit_report({r}, dir / "table3.tsv", ReportFormat::Tsv);
  EXPECT_EQ(testing::read_file(dir / "table3.skip.mlp.breakdown.csv"), "n,group_size,micro_f1\n1,3,1.000000\n");

  save_results({r}, dir / "results.json");
  const auto back = load_results(dir / "results.json");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].model, "skip");
  EXPECT_EQ(back[0].report.counts, r.report.counts);
  ASSERT_EQ(back[0].report.per_n_breakdown.size(), 1u);
  EXPECT_EQ(back[0].report.per_n_breakdown[0].size, 3u);
}

TEST(Report, MalformedResultsRaiseFormatError) {
  testing::TempDir dir("report-bad");
  testing::write_lines(dir / "bad.json", {"[{\"model\": 1}]"});
  EXPECT_THROW(load_results(dir / "bad.json"), FormatError);
}

}  // namespace
}  // namespace fnt
