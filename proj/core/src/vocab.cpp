#include "fnt/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "fnt/error.hpp"

namespace fnt {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, Count>& counts,
                                   Count min_count, bool lowercase, CorpusStats stats) {
  if (min_count == 0) throw ConfigError("min_count must be positive");
  std::vector<std::pair<std::string, Count>> kept;
  for (const auto& [token, c] : counts) {
    if (c >= min_count)
      kept.emplace_back(token, c);
    else
      stats.oov_tokens_dropped += c;
  }
  if (kept.empty())
    throw ConfigError("vocabulary is empty after applying min_count " +
                      std::to_string(min_count));
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary v;
  v.min_count_ = min_count;
  v.lowercase_ = lowercase;
  v.tokens_.reserve(kept.size());
  v.counts_.reserve(kept.size());
  for (auto& [token, c] : kept) {
    v.index_.emplace(token, static_cast<TokenId>(v.tokens_.size()));
    v.tokens_.push_back(std::move(token));
    v.counts_.push_back(c);
    v.total_count_ += c;
  }
  v.stats_ = stats;
  return v;
}

Count Vocabulary::count_of(std::string_view token) const {
  auto id = find(token);
  return id ? counts_[*id] : 0;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::normalize(std::string_view token) const {
  return lowercase_ ? to_lower_ascii(token) : std::string(token);
}

Vocabulary build_vocabulary(const std::filesystem::path& corpus_path, const VocabOptions& options) {
  std::ifstream in(corpus_path);
  if (!in) throw IoError("cannot read corpus " + corpus_path.string());

  std::unordered_map<std::string, Count> counts;
  CorpusStats stats;
  std::string line;
  while (std::getline(in, line)) {
    ++stats.total_lines;
    for (auto field : split_whitespace(line)) {
      ++stats.total_tokens;
      if (options.lowercase)
        ++counts[to_lower_ascii(field)];
      else
        ++counts[std::string(field)];
    }
  }
  if (in.bad()) throw IoError("error while reading " + corpus_path.string());
  return Vocabulary::from_counts(counts, options.min_count, options.lowercase, stats);
}

void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out << vocab.tokens()[i] << '\t' << vocab.counts()[i] << '\n';
  if (!out) throw IoError("error while writing " + path.string());
}

Vocabulary read_vocabulary(const std::filesystem::path& path, bool lowercase) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read vocabulary " + path.string());
  std::unordered_map<std::string, Count> counts;
  std::string line;
  std::size_t lineno = 0;
  Count min_seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw FormatError("expected token<TAB>count", lineno);
    Count c = 0;
    auto digits = std::string_view(line).substr(tab + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), c);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || c == 0)
      throw FormatError("bad count", lineno);
    if (!counts.emplace(line.substr(0, tab), c).second)
      throw FormatError("duplicate token '" + line.substr(0, tab) + "'", lineno);
    min_seen = min_seen == 0 ? c : std::min(min_seen, c);
  }
  if (counts.empty()) throw ConfigError("vocabulary file " + path.string() + " is empty");
  return Vocabulary::from_counts(counts, min_seen, lowercase);
}

NegativeTable build_negative_table(const Vocabulary& vocab, std::size_t size, double power) {
  return build_negative_table(vocab.counts(), size, power);
}

NegativeTable build_negative_table(std::span<const Count> counts, std::size_t size, double power) {
  if (counts.empty()) throw ConfigError("negative table needs a non-empty vocabulary");
  if (size < counts.size())
    throw ConfigError("negative table size " + std::to_string(size) +
                      " is smaller than the vocabulary (" + std::to_string(counts.size()) + ")");
  if (!(power > 0.0) || !std::isfinite(power)) throw ConfigError("negative table power must be positive");

  long double norm = 0;
  for (auto c : counts) norm += std::pow(static_cast<long double>(c), power);

  std::vector<TokenId> table;
  table.reserve(size);
  long double cumulative = 0;
  std::size_t filled = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    cumulative += std::pow(static_cast<long double>(counts[i]), power);
    std::size_t upto = i + 1 == counts.size()
                           ? size
                           : static_cast<std::size_t>(std::llround(cumulative / norm * size));
    upto = std::min(upto, size);
    for (; filled < upto; ++filled) table.push_back(static_cast<TokenId>(i));
  }
  return NegativeTable(std::move(table));
}

double keep_probability(double token_freq, double threshold) {
  if (!(token_freq > 0.0) || token_freq > 1.0)
    throw DomainError("token frequency must lie in (0, 1]");
  if (!(threshold > 0.0)) throw DomainError("subsampling threshold must be positive");
  double p = (std::sqrt(token_freq / threshold) + 1.0) * threshold / token_freq;
  return std::min(1.0, p);
}

}  // namespace fnt
