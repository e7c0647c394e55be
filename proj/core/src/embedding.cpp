#include "fnt/embedding.hpp"

#include <cmath>
#include <cstdio>

#include "fnt/error.hpp"

namespace fnt {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> tokens, std::size_t dim,
                                 std::vector<float> values, EmbeddingMetadata metadata)
    : tokens_(std::move(tokens)), dim_(dim), values_(std::move(values)), metadata_(std::move(metadata)) {
  if (values_.size() != tokens_.size() * dim_)
    throw ShapeError("embedding matrix has " + std::to_string(values_.size()) + " values for " +
                     std::to_string(tokens_.size()) + " rows of width " + std::to_string(dim_));
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (!index_.emplace(tokens_[i], i).second)
      throw FormatError("duplicate token '" + tokens_[i] + "'");
  for (float v : values_)
    if (!std::isfinite(v)) throw FormatError("embedding matrix contains a non-finite value");
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::span<const float>> EmbeddingMatrix::lookup(std::string_view token) const {
  auto r = find(token);
  if (!r) return std::nullopt;
  return row(*r);
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw ShapeError("cosine of vectors with different widths");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * b[i];
    na += double(a[i]) * a[i];
    nb += double(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fnt
