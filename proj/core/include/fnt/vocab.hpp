#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fnt {

using TokenId = std::uint32_t;
using Count = std::uint64_t;

struct CorpusStats {
  Count total_tokens = 0;
  Count total_lines = 0;
  // Tokens whose type fell below min_count.
  Count oov_tokens_dropped = 0;
};

struct VocabOptions {
  Count min_count = 100;
  bool lowercase = true;
};

// Frequency-filtered lexicon. Rows are ordered by descending count with
// lexicographic tie-break, so row ids are stable for a given corpus.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Builds from raw counts, dropping entries below min_count. Throws
  // ConfigError when nothing survives.
  static Vocabulary from_counts(const std::unordered_map<std::string, Count>& counts,
                                Count min_count, bool lowercase = false,
                                CorpusStats stats = {});

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  const std::string& token(TokenId id) const { return tokens_.at(id); }
  Count count(TokenId id) const { return counts_.at(id); }
  // Count of a token string, 0 when absent.
  Count count_of(std::string_view token) const;
  std::optional<TokenId> find(std::string_view token) const;

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<Count>& counts() const noexcept { return counts_; }
  Count total_count() const noexcept { return total_count_; }
  Count min_count() const noexcept { return min_count_; }
  bool lowercase() const noexcept { return lowercase_; }
  const CorpusStats& stats() const noexcept { return stats_; }

  // Applies the vocabulary's case convention to a raw token.
  std::string normalize(std::string_view token) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<Count> counts_;
  std::unordered_map<std::string, TokenId> index_;
  Count total_count_ = 0;
  Count min_count_ = 1;
  bool lowercase_ = false;
  CorpusStats stats_;
};

// ASCII case folding; bytes >= 0x80 pass through untouched.
std::string to_lower_ascii(std::string_view s);

// Splits on ASCII whitespace, skipping empty fields.
std::vector<std::string_view> split_whitespace(std::string_view line);

Vocabulary build_vocabulary(const std::filesystem::path& corpus_path,
                            const VocabOptions& options);

// TSV `token<TAB>count`, descending count order.
void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary read_vocabulary(const std::filesystem::path& path, bool lowercase = true);

// Unigram^power sampling table for negative sampling.
class NegativeTable {
 public:
  static constexpr std::size_t kDefaultSize = 10'000'000;
  static constexpr double kDefaultPower = 0.75;

  NegativeTable() = default;
  explicit NegativeTable(std::vector<TokenId> table) : table_(std::move(table)) {}

  std::size_t size() const noexcept { return table_.size(); }
  std::span<const TokenId> entries() const noexcept { return table_; }
  TokenId operator[](std::size_t i) const { return table_[i]; }

  // Draw using an externally supplied random value.
  TokenId sample(std::uint64_t random) const { return table_[random % table_.size()]; }

 private:
  std::vector<TokenId> table_;
};

// Token i receives round(F_i * size) - round(F_{i-1} * size) slots where F is
// the cumulative power-law distribution, so every share is within 1/size of
// its target. Throws ConfigError when size < |vocab|.
NegativeTable build_negative_table(const Vocabulary& vocab,
                                   std::size_t size = NegativeTable::kDefaultSize,
                                   double power = NegativeTable::kDefaultPower);
NegativeTable build_negative_table(std::span<const Count> counts, std::size_t size,
                                   double power = NegativeTable::kDefaultPower);

// Subsampling keep probability min(1, (sqrt(f/t) + 1) * t / f).
double keep_probability(double token_freq, double threshold);

}  // namespace fnt
