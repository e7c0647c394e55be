#include "fnt/windows.hpp"

#include <algorithm>
#include <string>

#include "fnt/error.hpp"

namespace fnt {

std::size_t EncodedCorpus::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<TokenId> encode_line(const Vocabulary& vocab, std::string_view line) {
  std::vector<TokenId> ids;
  for (auto field : split_whitespace(line)) {
    auto id = vocab.lowercase() ? vocab.find(to_lower_ascii(field)) : vocab.find(field);
    if (id) ids.push_back(*id);
  }
  return ids;
}

EncodedCorpus encode_corpus(const std::filesystem::path& corpus_path, const Vocabulary& vocab) {
  std::ifstream in(corpus_path);
  if (!in) throw IoError("cannot read corpus " + corpus_path.string());
  EncodedCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    ++corpus.stats.total_lines;
    auto ids = encode_line(vocab, line);
    const auto raw = split_whitespace(line).size();
    corpus.stats.total_tokens += raw;
    corpus.stats.oov_tokens_dropped += raw - ids.size();
    if (!ids.empty()) corpus.sentences.push_back(std::move(ids));
  }
  if (in.bad()) throw IoError("error while reading " + corpus_path.string());
  return corpus;
}

std::size_t fixed_window_pair_count(std::size_t n, int window) {
  const auto w = static_cast<std::size_t>(window);
  std::size_t pairs = 0;
  for (std::size_t pos = 0; pos < n; ++pos)
    pairs += std::min(w, pos) + std::min(w, n - 1 - pos);
  return pairs;
}

WindowStream::WindowStream(const std::filesystem::path& corpus_path, const Vocabulary& vocab,
                           WindowOptions options, std::uint64_t seed)
    : in_(corpus_path), vocab_(&vocab), options_(options), rng_(seed) {
  if (!in_) throw IoError("cannot read corpus " + corpus_path.string());
  if (options_.window < 1) throw ConfigError("window must be positive");
}

bool WindowStream::load_line() {
  std::string line;
  while (std::getline(in_, line)) {
    sentence_ = encode_line(*vocab_, line);
    if (sentence_.empty()) continue;
    pending_.clear();
    cursor_ = 0;
    for_each_window(sentence_, options_, rng_, [&](const Window& w) { pending_.push_back(w); });
    return true;
  }
  if (in_.bad()) throw IoError("error while reading corpus");
  return false;
}

bool WindowStream::next(Window& out) {
  while (cursor_ >= pending_.size())
    if (!load_line()) return false;
  out = pending_[cursor_++];
  return true;
}

}  // namespace fnt
