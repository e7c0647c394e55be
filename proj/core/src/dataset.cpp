#include "fnt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <utility>
#include <sstream>

#include <spdlog/spdlog.h>

#include "fnt/error.hpp"

namespace fnt {

namespace {

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    auto item = s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Reads `key<TAB>a,b,c` rows, merging repeated keys.
std::map<std::string, std::set<std::string>> load_keyed_lists(const std::filesystem::path& path,
                                                               std::string_view what) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + std::string(what) + " file " + path.string());
  std::map<std::string, std::set<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("expected key<TAB>list in " + std::string(what), lineno);
    if (line.find('\t', tab + 1) != std::string::npos)
      throw FormatError("too many columns in " + std::string(what), lineno);
    std::string key = line.substr(0, tab);
    if (key.empty()) throw FormatError("empty key in " + std::string(what), lineno);
    auto items = split_list(std::string_view(line).substr(tab + 1), ',');
    if (items.empty()) throw FormatError("empty list for '" + key + "' in " + std::string(what), lineno);
    out[key].insert(items.begin(), items.end());
  }
  if (in.bad()) throw IoError("error while reading " + path.string());
  return out;
}

// Unbiased draw from [0, bound) on top of the raw 64-bit engine, so sampling
// does not depend on the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

bool is_single_token(std::string_view name) {
  return !name.empty() && name.find_first_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

EntityTypes load_entity_types(const std::filesystem::path& path) {
  return load_keyed_lists(path, "entity-types");
}

NameEntityIndex load_name_entities(const std::filesystem::path& path) {
  return load_keyed_lists(path, "name-entities");
}

NameTypes load_name_types(const std::filesystem::path& path) {
  return load_keyed_lists(path, "name-types");
}

TypeMapping load_type_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read type mapping " + path.string());
  TypeMapping out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw FormatError("expected raw_type<TAB>coarse_type", lineno);
    out[line.substr(0, tab)].insert(line.substr(tab + 1));
  }
  if (in.bad()) throw IoError("error while reading " + path.string());
  return out;
}

NameTypes derive_name_types(const NameEntityIndex& index, const EntityTypes& entity_types,
                            const TypeMapping& mapping, DeriveStats* stats) {
  DeriveStats local;
  NameTypes out;
  for (const auto& [name, entities] : index) {
    auto& types = out[name];
    for (const auto& entity : entities) {
      auto it = entity_types.find(entity);
      if (it == entity_types.end()) {
        ++local.unknown_entities;
        continue;
      }
      for (const auto& raw : it->second) {
        auto m = mapping.find(raw);
        if (m == mapping.end()) {
          ++local.unmapped_raw_types;
          continue;
        }
        types.insert(m->second.begin(), m->second.end());
      }
    }
    if (types.empty()) ++local.untyped_names;
  }
  if (local.unmapped_raw_types)
    spdlog::info("dropped {} unmapped raw type assignments", local.unmapped_raw_types);
  if (stats) *stats = local;
  return out;
}

TypeSystem select_top_k_types(const NameTypes& name_types, std::size_t k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  std::map<std::string, std::size_t> freq;
  for (const auto& [name, types] : name_types)
    for (const auto& t : types) ++freq[t];
  if (freq.size() < k)
    throw ConfigError("requested top " + std::to_string(k) + " types but only " +
                      std::to_string(freq.size()) + " distinct types exist");
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> chosen;
  for (std::size_t i = 0; i < k; ++i) chosen.push_back(ranked[i].first);
  std::sort(chosen.begin(), chosen.end());
  return TypeSystem(std::move(chosen));
}

std::map<std::string, TypeSet> filter_names(const NameTypes& name_types, const Vocabulary& vocab,
                                            const TypeSystem& types, const FilterOptions& options,
                                            FilterStats* stats) {
  FilterStats local;
  std::map<std::string, TypeSet> out;
  for (const auto& [name, raw_types] : name_types) {
    if (!is_single_token(name)) {
      ++local.multi_word;
      continue;
    }
    auto key = to_lower_ascii(name);
    if (vocab.count_of(key) < options.min_corpus_freq) {
      ++local.below_frequency;
      continue;
    }
    TypeSet set = types.make_set();
    for (const auto& t : raw_types)
      if (auto idx = types.find(t)) set.set(*idx);
    if (set.none()) {
      ++local.no_known_type;
      continue;
    }
    auto [it, inserted] = out.try_emplace(key, set);
    if (!inserted) {
      ++local.merged_case_variants;
      for (auto i : set.indices()) it->second.set(i);
    }
  }
  if (stats) *stats = local;
  return out;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "unknown";
}

const std::vector<NameTypingExample>& NameTypingDataset::split(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Dev: return dev;
    case Split::Test: return test;
  }
  throw std::logic_error("unknown split");
}

std::vector<NameTypingExample>& NameTypingDataset::split(Split s) {
  return const_cast<std::vector<NameTypingExample>&>(std::as_const(*this).split(s));
}

std::vector<std::string> NameTypingDataset::types_missing_from_train() const {
  std::vector<bool> seen(types.size(), false);
  for (const auto& ex : train)
    for (auto i : ex.types.indices()) seen[i] = true;
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < types.size(); ++i)
    if (!seen[i]) missing.push_back(types.name(i));
  return missing;
}

NameTypingDataset sample_and_split(const std::map<std::string, TypeSet>& names, const TypeSystem& types,
                                   const SampleOptions& options) {
  const auto& f = options.fractions;
  if (f.train < 0 || f.dev < 0 || f.test < 0 || std::abs(f.train + f.dev + f.test - 1.0) > 1e-9)
    throw ConfigError("split fractions must be non-negative and sum to 1");

  std::vector<const std::pair<const std::string, TypeSet>*> pool;
  pool.reserve(names.size());
  for (const auto& entry : names) pool.push_back(&entry);

  std::size_t sample = options.sample_size;
  if (sample > pool.size()) {
    spdlog::warn("requested sample of {} names but only {} pass the filters; using all", sample, pool.size());
    sample = pool.size();
  }

  // Partial Fisher-Yates over the sorted pool.
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = 0; i < sample; ++i) {
    auto j = i + bounded(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }

  const auto n_train = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(sample) + 1e-9));
  const auto n_dev = static_cast<std::size_t>(std::floor(f.dev * static_cast<double>(sample) + 1e-9));

  NameTypingDataset ds;
  ds.types = types;
  ds.seed = options.seed;
  for (std::size_t i = 0; i < sample; ++i) {
    NameTypingExample ex{pool[i]->first, pool[i]->second};
    if (ex.types.size() != types.size()) throw ShapeError("type set does not match type system");
    if (i < n_train)
      ds.train.push_back(std::move(ex));
    else if (i < n_train + n_dev)
      ds.dev.push_back(std::move(ex));
    else
      ds.test.push_back(std::move(ex));
  }
  std::ostringstream prov;
  prov << "sample=" << sample << " of " << names.size() << ";fractions=" << f.train << ',' << f.dev << ','
       << f.test << ";seed=" << options.seed;
  ds.provenance = prov.str();

  auto missing = ds.types_missing_from_train();
  if (!missing.empty())
    spdlog::warn("{} type(s) have no training example, first: {}", missing.size(), missing.front());
  return ds;
}

std::array<SplitStats, 3> dataset_stats(const NameTypingDataset& dataset) {
  std::array<SplitStats, 3> out;
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& examples = dataset.split(kAllSplits[s]);
    auto& st = out[s];
    st.names = examples.size();
    st.empty = examples.empty();
    st.type_frequency.assign(dataset.types.size(), 0);
    std::size_t total = 0;
    for (const auto& ex : examples) {
      total += ex.types.count();
      for (auto i : ex.types.indices()) ++st.type_frequency[i];
    }
    st.avg_types = examples.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(examples.size());
  }
  return out;
}

void write_dataset(const NameTypingDataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto open = [&](const std::string& file) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / file).string());
    return out;
  };
  for (auto s : kAllSplits) {
    auto out = open(std::string(to_string(s)) + ".tsv");
    for (const auto& ex : dataset.split(s)) out << ex.name << '\t' << dataset.types.format(ex.types) << '\n';
    if (!out) throw IoError("error while writing split " + std::string(to_string(s)));
  }
  {
    auto out = open("types.txt");
    for (const auto& n : dataset.types.names()) out << n << '\n';
  }
  {
    auto out = open("meta.tsv");
    out << "seed\t" << dataset.seed << '\n'
        << "types\t" << dataset.types.size() << '\n'
        << "type_digest\t" << dataset.types.digest() << '\n'
        << "provenance\t" << dataset.provenance << '\n';
  }
}

void write_dataset_stats(const NameTypingDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "split\tnames\tavg_types";
  for (const auto& n : dataset.types.names()) out << '\t' << n;
  out << '\n';
  auto stats = dataset_stats(dataset);
  for (std::size_t s = 0; s < 3; ++s) {
    out << to_string(kAllSplits[s]) << '\t' << stats[s].names << '\t';
    if (stats[s].empty)
      out << "NA";
    else
      out << std::fixed << std::setprecision(4) << stats[s].avg_types;
    for (auto f : stats[s].type_frequency) out << '\t' << f;
    out << '\n';
  }
}

NameTypingDataset read_dataset(const std::filesystem::path& dir) {
  NameTypingDataset ds;
  std::array<NameTypes, 3> raw;
  std::array<std::vector<std::string>, 3> order;
  for (std::size_t s = 0; s < 3; ++s) {
    auto path = dir / (std::string(to_string(kAllSplits[s])) + ".tsv");
    if (!std::filesystem::exists(path)) throw IoError("missing dataset split " + path.string());
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0) throw FormatError("expected name<TAB>types in " + path.string(), lineno);
      auto name = line.substr(0, tab);
      auto types = split_list(std::string_view(line).substr(tab + 1), ',');
      if (types.empty()) throw FormatError("name '" + name + "' has no types in " + path.string(), lineno);
      if (raw[s].count(name)) throw FormatError("duplicate name '" + name + "' in " + path.string(), lineno);
      raw[s][name].insert(types.begin(), types.end());
      order[s].push_back(name);
    }
  }

  auto types_path = dir / "types.txt";
  if (std::filesystem::exists(types_path)) {
    std::ifstream in(types_path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) names.push_back(line);
    }
    ds.types = TypeSystem(std::move(names));
  } else {
    std::set<std::string> all;
    for (const auto& split : raw)
      for (const auto& [name, types] : split) all.insert(types.begin(), types.end());
    ds.types = TypeSystem(std::vector<std::string>(all.begin(), all.end()));
  }

  for (std::size_t s = 0; s < 3; ++s) {
    auto& examples = ds.split(kAllSplits[s]);
    for (const auto& name : order[s]) {
      TypeSet set = ds.types.make_set();
      for (const auto& t : raw[s][name]) {
        auto idx = ds.types.find(t);
        if (!idx) throw FormatError("type '" + t + "' of '" + name + "' is not in types.txt");
        set.set(*idx);
      }
      examples.push_back({name, std::move(set)});
    }
  }

  auto meta_path = dir / "meta.tsv";
  if (std::filesystem::exists(meta_path)) {
    std::ifstream in(meta_path);
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      auto key = line.substr(0, tab);
      auto value = line.substr(tab + 1);
      if (key == "seed") ds.seed = std::stoull(value);
      if (key == "provenance") ds.provenance = value;
    }
  }

  std::set<std::string> seen;
  for (auto s : kAllSplits)
    for (const auto& ex : ds.split(s))
      if (!seen.insert(ex.name).second) throw FormatError("name '" + ex.name + "' appears in more than one split");
  return ds;
}

}  // namespace fnt
