#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

#include "fnt/embedding.hpp"

namespace fnt {

enum class EmbeddingFileFormat { Word2VecText, Word2VecBinary, GloveText };

// CLI spelling: w2v-text | w2v-bin | glove.
std::string_view to_string(EmbeddingFileFormat format);
EmbeddingFileFormat parse_embedding_format(std::string_view name);

using TokenFilter = std::unordered_set<std::string>;

// Reads an embedding file in the declared format. With restrict_to, only rows
// whose token is in the set are kept (file order preserved). Throws IoError,
// or FormatError with a line number (entry number for binary files).
EmbeddingMatrix read_embeddings(const std::filesystem::path& path, EmbeddingFileFormat format,
                                const std::optional<TokenFilter>& restrict_to = std::nullopt);

// word2vec text:   "<rows> <dim>\n" then "token v1 ... vdim\n"
// word2vec binary: same ASCII header, then per row the token bytes, one
//                  space, dim little-endian float32 values and a newline
// GloVe text:      rows only, no header
// Refuses to write an empty matrix (ConfigError).
void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path,
                      EmbeddingFileFormat format);

// Shortest decimal text that parses back to exactly `value`, with ".0"
// appended to integral results ("1.0", "-2.0").
std::string format_float(float value);

}  // namespace fnt
