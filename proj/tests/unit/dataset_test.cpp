#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fnt/dataset.hpp"
#include "fnt/error.hpp"
#include "synthetic.hpp"

namespace fnt {
namespace {

using testing::read_file;
using testing::TempDir;
using testing::write_lines;

TEST(Loaders, EntityTypesSplitAndMerge) {
  TempDir dir("load");
  write_lines(dir / "et.tsv", {"e1\t/people/person,/military/officer", "e2\t/location/city", "e2\t/location/location"});
  const auto et = load_entity_types(dir / "et.tsv");
  EXPECT_EQ(et.at("e1"), (std::set<std::string>{"/people/person", "/military/officer"}));
  EXPECT_EQ(et.at("e2"), (std::set<std::string>{"/location/city", "/location/location"}));
}

TEST(Loaders, EmptyTypeListRejectedWithLine) {
  TempDir dir("load-bad");
  write_lines(dir / "et.tsv", {"e1\ta", "e2\t"});
  try {
    load_entity_types(dir / "et.tsv");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  write_lines(dir / "ne.tsv", {"name-without-tab"});
  EXPECT_THROW(load_name_entities(dir / "ne.tsv"), FormatError);
  EXPECT_THROW(load_entity_types(dir / "missing.tsv"), IoError);
}

TEST(DeriveNameTypes, WashingtonIsUnionOverEntities) {
  NameEntityIndex index{{"washington", {"dc", "state", "george"}}};
  EntityTypes et{{"dc", {"/r/city", "/r/location"}},
                 {"state", {"/r/state", "/r/location"}},
                 {"george", {"/r/politician", "/r/person", "/r/soldier"}}};
  TypeMapping mapping;
  for (const auto* t : {"city", "location", "state", "politician", "person", "soldier"})
    mapping[std::string("/r/") + t] = {t};
  const auto nt = derive_name_types(index, et, mapping);
  EXPECT_EQ(nt.at("washington"),
            (std::set<std::string>{"city", "location", "state", "politician", "person", "soldier"}));
}

TEST(DeriveNameTypes, UnmappedTypesDroppedAndCounted) {
  NameEntityIndex index{{"solo", {"e"}}, {"ghost", {"g"}}, {"lost", {"nowhere"}}};
  EntityTypes et{{"e", {"/r/a", "/r/zzz"}}, {"g", {"/r/zzz"}}};
  TypeMapping mapping{{"/r/a", {"a"}}};
  DeriveStats stats;
  const auto nt = derive_name_types(index, et, mapping, &stats);
  EXPECT_EQ(nt.at("solo"), (std::set<std::string>{"a"}));
  EXPECT_TRUE(nt.at("ghost").empty());
  EXPECT_EQ(stats.unmapped_raw_types, 2u);
  EXPECT_EQ(stats.unknown_entities, 1u);
  EXPECT_EQ(stats.untyped_names, 2u);
}

TEST(DeriveNameTypes, AddingAnEntityNeverRemovesTypes) {
  std::mt19937_64 rng(5);
  EntityTypes et;
  TypeMapping mapping;
  for (int e = 0; e < 30; ++e)
    for (int k = 0; k < 3; ++k) et["e" + std::to_string(e)].insert("/r/" + std::to_string(rng() % 12));
  for (int t = 0; t < 12; t += 2) mapping["/r/" + std::to_string(t)] = {"c" + std::to_string(t / 2)};
  for (int trial = 0; trial < 50; ++trial) {
    NameEntityIndex index{{"n", {}}};
    for (int k = 0; k < 3; ++k) index["n"].insert("e" + std::to_string(rng() % 30));
    const auto before = derive_name_types(index, et, mapping).at("n");
    index["n"].insert("e" + std::to_string(rng() % 30));
    const auto after = derive_name_types(index, et, mapping).at("n");
    EXPECT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
  }
}

TEST(TopK, LexicographicTieBreak) {
  NameTypes nt;
  for (int i = 0; i < 5; ++i) nt["n" + std::to_string(i)].insert("a");
  for (int i = 0; i < 3; ++i) nt["n" + std::to_string(i)].insert("c");
  for (int i = 2; i < 5; ++i) nt["n" + std::to_string(i)].insert("b");
  EXPECT_EQ(select_top_k_types(nt, 2).names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(select_top_k_types(nt, 3).names(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(select_top_k_types(nt, 4), ConfigError);
  EXPECT_THROW(select_top_k_types(nt, 0), ConfigError);
}

TEST(TypeSystem, DefaultInventoryHasFiftyUniqueTypes) {
  const auto ts = TypeSystem::default_inventory();
  ASSERT_EQ(ts.size(), 50u);
  EXPECT_TRUE(std::is_sorted(ts.names().begin(), ts.names().end()));
  EXPECT_TRUE(ts.find("/person"));
  EXPECT_TRUE(ts.find("/location"));
  EXPECT_THROW(TypeSystem({"a", "a"}), ConfigError);
  EXPECT_THROW(TypeSystem({"a", ""}), ConfigError);
}

TEST(TypeSystem, FormatAndParse) {
  TypeSystem ts({"b", "a", "c"});
  auto s = ts.parse("c,b");
  EXPECT_EQ(ts.format(s), "b,c");
  EXPECT_THROW(ts.parse("b,zzz"), FormatError);
  EXPECT_EQ(ts.parse("b,zzz", true).count(), 1u);
}

Vocabulary vocab_with(const std::map<std::string, Count>& counts) {
  std::unordered_map<std::string, Count> c(counts.begin(), counts.end());
  return Vocabulary::from_counts(c, 1, true);
}

TEST(FilterNames, DropsMultiWordRareAndUntyped) {
  NameTypes nt{{"new york", {"city"}}, {"rare", {"city"}}, {"boston", {"city", "other"}},
               {"typeless", {"other"}}, {"paris", {"city"}}};
  auto vocab = vocab_with({{"rare", 99}, {"boston", 100}, {"typeless", 500}, {"paris", 101}, {"new", 900}});
  TypeSystem ts({"city"});
  FilterStats stats;
  const auto kept = filter_names(nt, vocab, ts, {100}, &stats);
  EXPECT_EQ(kept.size(), 2u);
  EXPECT_TRUE(kept.count("boston"));
  EXPECT_TRUE(kept.count("paris"));
  EXPECT_EQ(stats.multi_word, 1u);
  EXPECT_EQ(stats.below_frequency, 1u);
  EXPECT_EQ(stats.no_known_type, 1u);
}

TEST(FilterNames, CaseVariantsMergeByUnion) {
  NameTypes nt{{"Apple", {"company"}}, {"apple", {"food"}}};
  auto vocab = vocab_with({{"apple", 200}});
  TypeSystem ts({"company", "food"});
  FilterStats stats;
  const auto kept = filter_names(nt, vocab, ts, {100}, &stats);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept.at("apple").count(), 2u);
  EXPECT_EQ(stats.merged_case_variants, 1u);
}

std::map<std::string, TypeSet> synthetic_pool(std::size_t n, const TypeSystem& ts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<std::string, TypeSet> pool;
  for (std::size_t i = 0; i < n; ++i) {
    TypeSet s = ts.make_set();
    s.set(i % ts.size());
    s.set(rng() % ts.size());
    pool.emplace("name" + std::to_string(i), s);
  }
  return pool;
}

TEST(SampleAndSplit, TenNamesSplitFiveTwoThree) {
  TypeSystem ts({"a"});
  auto d = sample_and_split(synthetic_pool(10, ts, 1), ts, {10, {}, 3});
  EXPECT_EQ(d.train.size(), 5u);
  EXPECT_EQ(d.dev.size(), 2u);
  EXPECT_EQ(d.test.size(), 3u);
}

TEST(SampleAndSplit, HundredThousandSplitsExactly) {
  TypeSystem ts({"a", "b", "c", "d"});
  auto d = sample_and_split(synthetic_pool(120'000, ts, 2), ts, {100'000, {0.5, 0.2, 0.3}, 9});
  EXPECT_EQ(d.train.size(), 50'000u);
  EXPECT_EQ(d.dev.size(), 20'000u);
  EXPECT_EQ(d.test.size(), 30'000u);
}

TEST(SampleAndSplit, DisjointExhaustiveAndDeterministic) {
  TypeSystem ts({"a", "b", "c"});
  const auto pool = synthetic_pool(1000, ts, 4);
  const auto a = sample_and_split(pool, ts, {400, {0.6, 0.1, 0.3}, 5});
  const auto b = sample_and_split(pool, ts, {400, {0.6, 0.1, 0.3}, 5});
  const auto c = sample_and_split(pool, ts, {400, {0.6, 0.1, 0.3}, 6});
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.dev, b.dev);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);

  std::set<std::string> seen;
  for (auto s : kAllSplits)
    for (const auto& ex : a.split(s)) {
      EXPECT_TRUE(seen.insert(ex.name).second) << "duplicate " << ex.name;
      EXPECT_EQ(ex.types, pool.at(ex.name));
    }
  EXPECT_EQ(seen.size(), 400u);
}

TEST(SampleAndSplit, OversizedSampleTakesEverything) {
  TypeSystem ts({"a"});
  auto d = sample_and_split(synthetic_pool(7, ts, 1), ts, {100, {}, 1});
  EXPECT_EQ(d.train.size() + d.dev.size() + d.test.size(), 7u);
}

TEST(SampleAndSplit, FractionsMustSumToOne) {
  TypeSystem ts({"a"});
  EXPECT_THROW(sample_and_split(synthetic_pool(10, ts, 1), ts, {10, {0.5, 0.2, 0.2}, 1}), ConfigError);
}

TEST(DatasetStats, AveragesAndEmptySplits) {
  TypeSystem ts({"a", "b", "c", "d"});
  NameTypingDataset d;
  d.types = ts;
  d.train.push_back({"x", ts.parse("a,b")});
  d.train.push_back({"y", ts.parse("a,b,c,d")});
  const auto stats = dataset_stats(d);
  EXPECT_DOUBLE_EQ(stats[0].avg_types, 3.0);
  EXPECT_EQ(stats[0].names, 2u);
  EXPECT_EQ(stats[0].type_frequency, (std::vector<std::size_t>{2, 2, 1, 1}));
  EXPECT_FALSE(stats[0].empty);
  EXPECT_TRUE(stats[1].empty);
  EXPECT_EQ(stats[1].avg_types, 0.0);
}

TEST(DatasetFiles, RoundTripAndByteIdenticalRewrites) {
  TempDir dir("ds");
  TypeSystem ts({"b", "a", "c"});
  const auto d = sample_and_split(synthetic_pool(50, ts, 3), ts, {50, {}, 8});
  write_dataset(d, dir / "one");
  write_dataset(sample_and_split(synthetic_pool(50, ts, 3), ts, {50, {}, 8}), dir / "two");
  for (const auto* f : {"train.tsv", "dev.tsv", "test.tsv", "types.txt", "meta.tsv"})
    EXPECT_EQ(read_file(dir / "one" / f), read_file(dir / "two" / f)) << f;

  const auto back = read_dataset(dir / "one");
  EXPECT_EQ(back.types, ts);
  EXPECT_EQ(back.train, d.train);
  EXPECT_EQ(back.dev, d.dev);
  EXPECT_EQ(back.test, d.test);

  // Types are written in type-system order, not alphabetically.
  const auto first = d.train.front();
  const auto text = read_file(dir / "one" / "train.tsv");
  EXPECT_NE(text.find(first.name + "\t" + ts.format(first.types) + "\n"), std::string::npos);
}

TEST(DatasetFiles, MissingSplitIsIoError) {
  TempDir dir("ds-missing");
  TypeSystem ts({"a"});
  write_dataset(sample_and_split(synthetic_pool(10, ts, 1), ts, {10, {}, 1}), dir.path());
  std::filesystem::remove(dir / "dev.tsv");
  EXPECT_THROW(read_dataset(dir.path()), IoError);
}

TEST(DatasetFiles, PrebuiltNameTypesMergeDuplicates) {
  TempDir dir("prebuilt");
  write_lines(dir / "p.tsv", {"paris\tcity,location", "paris\tperson", "obama\tperson,politician"});
  const auto nt = load_name_types(dir / "p.tsv");
  EXPECT_EQ(nt.at("paris").size(), 3u);
  EXPECT_EQ(nt.at("obama").size(), 2u);
}

}  // namespace
}  // namespace fnt
