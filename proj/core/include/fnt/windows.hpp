#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <vector>

#include "fnt/vocab.hpp"

namespace fnt {

struct ContextToken {
  TokenId id;
  int offset;  // relative position, never 0

  friend bool operator==(const ContextToken&, const ContextToken&) = default;
};

struct Window {
  TokenId center = 0;
  std::vector<ContextToken> context;
};

struct WindowOptions {
  int window = 3;
  // Draw the effective window per center uniformly from [1, window].
  bool dynamic = false;
};

// In-memory corpus with OOV tokens already removed; one sentence per line.
struct EncodedCorpus {
  std::vector<std::vector<TokenId>> sentences;
  CorpusStats stats;

  std::size_t token_count() const noexcept;
  bool empty() const noexcept { return token_count() == 0; }
};

// Maps one raw line to row ids, dropping OOV tokens.
std::vector<TokenId> encode_line(const Vocabulary& vocab, std::string_view line);

EncodedCorpus encode_corpus(const std::filesystem::path& corpus_path, const Vocabulary& vocab);

// Number of context pairs a fixed window yields for a sentence of length n.
std::size_t fixed_window_pair_count(std::size_t n, int window);

// Calls fn(const Window&) for every position of an encoded sentence. The rng is
// only consulted in dynamic mode.
template <class Fn>
void for_each_window(std::span<const TokenId> sentence, const WindowOptions& options,
                     std::mt19937_64& rng, Fn&& fn) {
  Window w;
  const auto n = static_cast<long>(sentence.size());
  for (long pos = 0; pos < n; ++pos) {
    int span = options.window;
    if (options.dynamic && options.window > 1)
      span = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(options.window));
    w.center = sentence[pos];
    w.context.clear();
    for (long c = pos - span; c <= pos + span; ++c) {
      if (c == pos || c < 0 || c >= n) continue;
      w.context.push_back({sentence[c], static_cast<int>(c - pos)});
    }
    fn(static_cast<const Window&>(w));
  }
}

// Pull-style window iterator over a corpus file.
class WindowStream {
 public:
  WindowStream(const std::filesystem::path& corpus_path, const Vocabulary& vocab,
               WindowOptions options, std::uint64_t seed);

  // Fills `out` with the next window; false at end of corpus.
  bool next(Window& out);

 private:
  bool load_line();

  std::ifstream in_;
  const Vocabulary* vocab_;
  WindowOptions options_;
  std::mt19937_64 rng_;
  std::vector<TokenId> sentence_;
  std::vector<Window> pending_;
  std::size_t cursor_ = 0;
};

}  // namespace fnt
