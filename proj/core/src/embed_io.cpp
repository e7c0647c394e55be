#include "fnt/embed_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "fnt/error.hpp"
#include "fnt/vocab.hpp"

namespace fnt {

std::string_view to_string(EmbeddingFileFormat format) {
  switch (format) {
    case EmbeddingFileFormat::Word2VecText: return "w2v-text";
    case EmbeddingFileFormat::Word2VecBinary: return "w2v-bin";
    case EmbeddingFileFormat::GloveText: return "glove";
  }
  return "unknown";
}

EmbeddingFileFormat parse_embedding_format(std::string_view name) {
  if (name == "w2v-text") return EmbeddingFileFormat::Word2VecText;
  if (name == "w2v-bin") return EmbeddingFileFormat::Word2VecBinary;
  if (name == "glove") return EmbeddingFileFormat::GloveText;
  throw ConfigError("unknown embedding format '" + std::string(name) + "' (expected w2v-text|w2v-bin|glove)");
}

std::string format_float(float value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, end);
  if (std::isfinite(value) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

struct Collected {
  std::vector<std::string> tokens;
  std::vector<float> values;
  std::size_t dim = 0;
};

bool wanted(const std::optional<TokenFilter>& filter, const std::string& token) {
  return !filter || filter->contains(token);
}

float parse_value(std::string_view field, std::size_t lineno) {
  float v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw FormatError("cannot parse value '" + std::string(field) + "'", lineno);
  if (!std::isfinite(v)) throw FormatError("non-finite value", lineno);
  return v;
}

std::size_t parse_size(std::string_view field, std::size_t lineno) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw FormatError("bad header field '" + std::string(field) + "'", lineno);
  return v;
}

std::pair<std::size_t, std::size_t> parse_header(const std::string& line) {
  auto fields = split_whitespace(line);
  if (fields.size() != 2) throw FormatError("expected header '<rows> <dim>'", 1);
  auto rows = parse_size(fields[0], 1);
  auto dim = parse_size(fields[1], 1);
  if (dim == 0) throw FormatError("header declares zero dimensions", 1);
  return {rows, dim};
}

EmbeddingMatrix finish(Collected c, const std::filesystem::path& path) {
  std::unordered_set<std::string> seen;
  seen.reserve(c.tokens.size());
  for (const auto& t : c.tokens)
    if (!seen.insert(t).second) throw FormatError("duplicate token '" + t + "' in " + path.string());
  return EmbeddingMatrix(std::move(c.tokens), c.dim, std::move(c.values),
                         EmbeddingMetadata{"external", ""});
}

EmbeddingMatrix read_text(const std::filesystem::path& path, bool has_header,
                          const std::optional<TokenFilter>& restrict_to) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read embeddings " + path.string());

  Collected c;
  std::size_t declared_rows = 0;
  std::size_t lineno = 0;
  std::string line;
  if (has_header) {
    if (!std::getline(in, line)) throw FormatError("missing header", 1);
    lineno = 1;
    std::tie(declared_rows, c.dim) = parse_header(line);
  }

  std::unordered_set<std::string> seen;
  std::size_t rows = 0;
  std::size_t blank_run_start = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_whitespace(line);
    if (fields.empty()) {
      if (!blank_run_start) blank_run_start = lineno;
      continue;
    }
    if (blank_run_start) throw FormatError("blank line inside embedding data", blank_run_start);
    if (c.dim == 0) {
      if (fields.size() < 2) throw FormatError("row has no values", lineno);
      c.dim = fields.size() - 1;
    }
    if (fields.size() != c.dim + 1)
      throw FormatError("expected " + std::to_string(c.dim) + " values, found " +
                            std::to_string(fields.size() - 1),
                        lineno);
    std::string token(fields[0]);
    if (!seen.insert(token).second) throw FormatError("duplicate token '" + token + "'", lineno);
    ++rows;
    // Values are validated even for rows that get filtered out.
    std::vector<float> row(c.dim);
    for (std::size_t i = 0; i < c.dim; ++i) row[i] = parse_value(fields[i + 1], lineno);
    if (!wanted(restrict_to, token)) continue;
    c.tokens.push_back(std::move(token));
    c.values.insert(c.values.end(), row.begin(), row.end());
  }
  if (in.bad()) throw IoError("error while reading " + path.string());
  if (has_header && rows != declared_rows)
    throw FormatError("header declares " + std::to_string(declared_rows) + " rows, file has " +
                          std::to_string(rows),
                      lineno);
  if (c.dim == 0) throw FormatError("no embedding rows in " + path.string());
  return finish(std::move(c), path);
}

float load_le_float(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

void store_le_float(float v, char* p) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  std::memcpy(p, &bits, 4);
}

EmbeddingMatrix read_binary(const std::filesystem::path& path, const std::optional<TokenFilter>& restrict_to) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read embeddings " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw FormatError("missing header", 1);
  Collected c;
  std::size_t declared_rows = 0;
  std::tie(declared_rows, c.dim) = parse_header(header);

  std::vector<char> payload(4 * c.dim);
  std::vector<float> row(c.dim);
  std::unordered_set<std::string> seen;
  for (std::size_t entry = 1; entry <= declared_rows; ++entry) {
    int ch = in.get();
    while (ch == '\n' || ch == '\r') ch = in.get();
    std::string token;
    while (ch != EOF && ch != ' ') {
      token.push_back(static_cast<char>(ch));
      ch = in.get();
    }
    if (ch == EOF) throw FormatError("truncated binary file: entry " + std::to_string(entry) + " incomplete");
    if (token.empty()) throw FormatError("empty token in binary entry " + std::to_string(entry));
    if (!in.read(payload.data(), static_cast<std::streamsize>(payload.size())))
      throw FormatError("truncated vector for binary entry " + std::to_string(entry));
    for (std::size_t i = 0; i < c.dim; ++i) {
      row[i] = load_le_float(payload.data() + 4 * i);
      if (!std::isfinite(row[i])) throw FormatError("non-finite value in binary entry " + std::to_string(entry));
    }
    if (!seen.insert(token).second)
      throw FormatError("duplicate token '" + token + "' in binary entry " + std::to_string(entry));
    if (!wanted(restrict_to, token)) continue;
    c.tokens.push_back(std::move(token));
    c.values.insert(c.values.end(), row.begin(), row.end());
  }
  // Anything left must be whitespace.
  for (int ch = in.get(); ch != EOF; ch = in.get())
    if (ch != '\n' && ch != '\r' && ch != ' ' && ch != '\t')
      throw FormatError("trailing data after " + std::to_string(declared_rows) + " binary entries");
  return finish(std::move(c), path);
}

}  // namespace

EmbeddingMatrix read_embeddings(const std::filesystem::path& path, EmbeddingFileFormat format,
                                const std::optional<TokenFilter>& restrict_to) {
  switch (format) {
    case EmbeddingFileFormat::Word2VecText: return read_text(path, true, restrict_to);
    case EmbeddingFileFormat::GloveText: return read_text(path, false, restrict_to);
    case EmbeddingFileFormat::Word2VecBinary: return read_binary(path, restrict_to);
  }
  throw ConfigError("unsupported embedding format");
}

void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path,
                      EmbeddingFileFormat format) {
  if (matrix.empty()) throw ConfigError("refusing to write an empty embedding matrix");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embeddings " + path.string());

  if (format != EmbeddingFileFormat::GloveText) out << matrix.rows() << ' ' << matrix.dim() << '\n';
  std::vector<char> payload(4 * matrix.dim());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out << matrix.token(r);
    auto row = matrix.row(r);
    if (format == EmbeddingFileFormat::Word2VecBinary) {
      out.put(' ');
      for (std::size_t i = 0; i < row.size(); ++i) store_le_float(row[i], payload.data() + 4 * i);
      out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    } else {
      for (float v : row) out << ' ' << format_float(v);
    }
    out.put('\n');
  }
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace fnt
