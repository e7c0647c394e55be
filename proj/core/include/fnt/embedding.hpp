#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fnt {

struct EmbeddingMetadata {
  std::string model;          // e.g. "sskip", or "external" for loaded files
  std::string config_digest;  // hex digest of the training configuration
};

// Token-aligned dense float matrix, one row per token, rows in token order.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws ShapeError if values.size() != tokens.size() * dim, FormatError on
  // duplicate tokens or non-finite values.
  EmbeddingMatrix(std::vector<std::string> tokens, std::size_t dim, std::vector<float> values,
                  EmbeddingMetadata metadata = {});

  std::size_t rows() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return tokens_.empty(); }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(std::size_t row) const { return tokens_.at(row); }
  std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * dim_, dim_};
  }
  std::span<const float> values() const noexcept { return values_; }

  // Case-sensitive exact lookup; never synthesises a vector for unknown tokens.
  std::optional<std::span<const float>> lookup(std::string_view token) const;
  std::optional<std::size_t> find(std::string_view token) const;

  const EmbeddingMetadata& metadata() const noexcept { return metadata_; }
  void set_metadata(EmbeddingMetadata m) { metadata_ = std::move(m); }

 private:
  std::vector<std::string> tokens_;
  std::size_t dim_ = 0;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
  EmbeddingMetadata metadata_;
};

inline std::optional<std::span<const float>> lookup(const EmbeddingMatrix& m, std::string_view token) {
  return m.lookup(token);
}

double cosine(std::span<const float> a, std::span<const float> b);

// 64-bit FNV-1a, used for configuration and type-system digests.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);
std::string hex_digest(std::uint64_t h);

}  // namespace fnt
