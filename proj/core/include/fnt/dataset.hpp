#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fnt/type_system.hpp"
#include "fnt/vocab.hpp"

namespace fnt {

using EntityTypes = std::map<std::string, std::set<std::string>>;   // entity -> raw types
using NameEntityIndex = std::map<std::string, std::set<std::string>>;  // name -> entities
using TypeMapping = std::map<std::string, std::set<std::string>>;   // raw type -> coarse types
using NameTypes = std::map<std::string, std::set<std::string>>;     // name -> coarse types

// `entity<TAB>type1,type2,...`; duplicate entities are merged by union.
// Rows with no types or no tab throw FormatError carrying the line number.
EntityTypes load_entity_types(const std::filesystem::path& path);
// `name<TAB>entity1,entity2,...`, merged by union.
NameEntityIndex load_name_entities(const std::filesystem::path& path);
// `raw_type<TAB>coarse_type`; a raw type may appear on several rows.
TypeMapping load_type_mapping(const std::filesystem::path& path);
// Pre-built `name<TAB>type1,type2,...` rows (the published dataset layout).
NameTypes load_name_types(const std::filesystem::path& path);

struct DeriveStats {
  std::size_t unmapped_raw_types = 0;  // (entity, raw type) pairs with no mapping
  std::size_t unknown_entities = 0;    // entity ids absent from the entity-type table
  std::size_t untyped_names = 0;       // names left with an empty set
};

// A name's types are the union of the mapped types of all its entities.
// Names whose types are all unmapped are kept with an empty set.
NameTypes derive_name_types(const NameEntityIndex& index, const EntityTypes& entity_types,
                            const TypeMapping& mapping, DeriveStats* stats = nullptr);

// The k types carried by the most names (ties by name), returned in
// lexicographic order. Throws ConfigError if fewer than k types exist.
TypeSystem select_top_k_types(const NameTypes& name_types, std::size_t k = 50);

struct FilterOptions {
  Count min_corpus_freq = 100;
};

struct FilterStats {
  std::size_t multi_word = 0;
  std::size_t below_frequency = 0;
  std::size_t no_known_type = 0;
  std::size_t merged_case_variants = 0;
};

// Keeps single-token names whose lowercased form has corpus frequency >=
// min_corpus_freq and at least one type inside the type system. Names that
// collide after lowercasing are merged by union. Keys are lowercased.
std::map<std::string, TypeSet> filter_names(const NameTypes& name_types, const Vocabulary& vocab,
                                            const TypeSystem& types, const FilterOptions& options = {},
                                            FilterStats* stats = nullptr);

struct NameTypingExample {
  std::string name;
  TypeSet types;

  friend bool operator==(const NameTypingExample&, const NameTypingExample&) = default;
};

enum class Split { Train, Dev, Test };
inline constexpr std::array<Split, 3> kAllSplits{Split::Train, Split::Dev, Split::Test};
std::string_view to_string(Split split);

struct SplitFractions {
  double train = 0.5;
  double dev = 0.2;
  double test = 0.3;
};

struct NameTypingDataset {
  TypeSystem types;
  std::vector<NameTypingExample> train;
  std::vector<NameTypingExample> dev;
  std::vector<NameTypingExample> test;
  std::uint64_t seed = 0;
  std::string provenance;

  const std::vector<NameTypingExample>& split(Split s) const;
  std::vector<NameTypingExample>& split(Split s);
  // Types in the type system that never occur in the training split.
  std::vector<std::string> types_missing_from_train() const;
};

struct SampleOptions {
  std::size_t sample_size = 100'000;
  SplitFractions fractions;
  std::uint64_t seed = 1;
};

// Uniform sample without replacement, then train/dev sizes are
// floor(fraction * sample) and the remainder goes to test. Sampling with a
// fixed seed is deterministic across platforms. Throws ConfigError when the
// fractions do not sum to 1 (within 1e-9).
NameTypingDataset sample_and_split(const std::map<std::string, TypeSet>& names, const TypeSystem& types,
                                   const SampleOptions& options);

struct SplitStats {
  std::size_t names = 0;
  double avg_types = 0.0;
  std::vector<std::size_t> type_frequency;  // indexed by type bit
  bool empty = true;
};

std::array<SplitStats, 3> dataset_stats(const NameTypingDataset& dataset);

// Writes train.tsv, dev.tsv, test.tsv (`name<TAB>type1,type2`, types in
// type-system order), types.txt and meta.tsv into dir.
void write_dataset(const NameTypingDataset& dataset, const std::filesystem::path& dir);
// Stats table: split, names, avg_types, then one column per type.
void write_dataset_stats(const NameTypingDataset& dataset, const std::filesystem::path& path);
// Reads a directory produced by write_dataset. A missing types.txt falls back
// to the lexicographically ordered union of types in the split files.
NameTypingDataset read_dataset(const std::filesystem::path& dir);

}  // namespace fnt
