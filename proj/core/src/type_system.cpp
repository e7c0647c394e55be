#include "fnt/type_system.hpp"

#include <bit>

#include "fnt/embedding.hpp"
#include "fnt/error.hpp"

namespace fnt {

std::size_t TypeSet::heap_count() const noexcept {
  std::size_t n = 0;
  const auto* w = words();
  for (std::size_t i = 0; i < word_count(); ++i) n += static_cast<std::size_t>(std::popcount(w[i]));
  return n;
}

std::size_t TypeSet::heap_intersection_count(const TypeSet& other) const {
  if (other.size_ != size_) throw ShapeError("type sets over different type systems");
  std::size_t n = 0;
  const auto *a = words(), *b = other.words();
  for (std::size_t i = 0; i < word_count(); ++i) n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return n;
}

std::vector<std::size_t> TypeSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size_; ++i)
    if (test(i)) out.push_back(i);
  return out;
}

TypeSystem::TypeSystem(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ConfigError("empty type name");
    if (!index_.emplace(names_[i], i).second) throw ConfigError("duplicate type name '" + names_[i] + "'");
  }
}

TypeSystem TypeSystem::default_inventory() {
  return TypeSystem({
      "/art", "/art/film", "/astral_body", "/biology", "/broadcast_network",
      "/broadcast_program", "/building", "/building/restaurant", "/chemistry",
      "/computer/programming_language", "/disease", "/event", "/food", "/game",
      "/geography/island", "/geography/mountain", "/god", "/internet/website",
      "/living_thing", "/location", "/location/body_of_water", "/location/cemetery",
      "/location/city", "/location/county", "/medicine/drug", "/medicine/medical_treatment",
      "/medicine/symptom", "/music", "/organization", "/organization/airline",
      "/organization/company", "/organization/educational_institution",
      "/organization/sports_team", "/people/ethnicity", "/person", "/person/actor",
      "/person/artist", "/person/athlete", "/person/author", "/person/director",
      "/person/engineer", "/person/musician", "/play", "/product", "/product/airplane",
      "/product/instrument", "/product/ship", "/software", "/title", "/written_work",
  });
}

std::optional<std::size_t> TypeSystem::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string TypeSystem::format(const TypeSet& set) const {
  if (set.size() != size()) throw ShapeError("type set does not belong to this type system");
  std::string out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!set.test(i)) continue;
    if (!out.empty()) out += ',';
    out += names_[i];
  }
  return out;
}

TypeSet TypeSystem::parse(std::string_view list, bool drop_unknown) const {
  TypeSet set = make_set();
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    auto item = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!item.empty() && (item.front() == ' ')) item.remove_prefix(1);
    while (!item.empty() && (item.back() == ' ' || item.back() == '\r')) item.remove_suffix(1);
    if (!item.empty()) {
      auto idx = find(item);
      if (idx)
        set.set(*idx);
      else if (!drop_unknown)
        throw FormatError("unknown type '" + std::string(item) + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return set;
}

std::string TypeSystem::digest() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& n : names_) h = fnv1a64(n + "\n", h);
  return hex_digest(h);
}

}  // namespace fnt
