#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fnt {

// Fixed-width bitset over the types of a TypeSystem.
class TypeSet {
 public:
  TypeSet() = default;
  explicit TypeSet(std::size_t size) : size_(size) {
    if (size > 64) heap_.assign((size + 63) / 64, 0);
  }

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const { return (words()[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value = true) {
    const auto mask = std::uint64_t{1} << (i % 64);
    auto& w = words()[i / 64];
    w = (w & ~mask) | (-static_cast<std::uint64_t>(value) & mask);
  }
  std::size_t count() const noexcept {
    return size_ > 64 ? heap_count() : static_cast<std::size_t>(std::popcount(inline_));
  }
  bool none() const noexcept { return count() == 0; }
  // |a & b|; sizes must match.
  std::size_t intersection_count(const TypeSet& other) const {
    if (other.size_ != size_ || size_ > 64) return heap_intersection_count(other);
    return static_cast<std::size_t>(std::popcount(inline_ & other.inline_));
  }
  std::vector<std::size_t> indices() const;

  friend bool operator==(const TypeSet& a, const TypeSet& b) noexcept {
    if (a.size_ > 64 || b.size_ > 64) return a.size_ == b.size_ && a.heap_ == b.heap_;
    return (a.size_ == b.size_) & (a.inline_ == b.inline_);
  }

 private:
  // Sets of up to 64 types live in inline_; larger ones use heap_ only.
  std::size_t heap_count() const noexcept;
  std::size_t heap_intersection_count(const TypeSet& other) const;
  std::size_t word_count() const noexcept { return size_ > 64 ? heap_.size() : 1; }
  const std::uint64_t* words() const noexcept { return size_ > 64 ? heap_.data() : &inline_; }
  std::uint64_t* words() noexcept { return size_ > 64 ? heap_.data() : &inline_; }

  std::size_t size_ = 0;
  std::uint64_t inline_ = 0;
  std::vector<std::uint64_t> heap_;
};

// Ordered inventory of type names; position defines the bit index.
class TypeSystem {
 public:
  TypeSystem() = default;
  // Throws ConfigError on duplicate or empty names.
  explicit TypeSystem(std::vector<std::string> names);

  // The 50-type inventory used by the published name-typing dataset.
  static TypeSystem default_inventory();

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;

  TypeSet make_set() const { return TypeSet(size()); }
  // Comma-joined names in bit order.
  std::string format(const TypeSet& set) const;
  // Parses a comma-separated list; unknown names throw FormatError unless
  // drop_unknown is set.
  TypeSet parse(std::string_view list, bool drop_unknown = false) const;

  std::string digest() const;

  friend bool operator==(const TypeSystem& a, const TypeSystem& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace fnt
