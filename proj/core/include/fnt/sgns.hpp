#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "fnt/vocab.hpp"
#include "fnt/windows.hpp"

namespace fnt {

enum class ModelKind { Skip, Cbow, StructuredSkip, ContinuousWindow };

std::string_view to_string(ModelKind kind);
// Accepts skip|cbow|sskip|cwin (case-insensitive). Throws ConfigError.
ModelKind parse_model_kind(std::string_view name);

constexpr bool is_order_aware(ModelKind k) {
  return k == ModelKind::StructuredSkip || k == ModelKind::ContinuousWindow;
}
// SKIP/SSKIP predict each context token from the center vector; CBOW/CWIN
// predict the center from a pooled context representation.
constexpr bool predicts_context(ModelKind k) {
  return k == ModelKind::Skip || k == ModelKind::StructuredSkip;
}
std::size_t hidden_width(ModelKind kind, std::size_t dim, int window);

inline constexpr double kSigmoidClamp = 6.0;

// Logistic function with its argument clamped to [-kSigmoidClamp, kSigmoidClamp].
double clamped_sigmoid(double x);

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Column block of an output matrix: row r is `width` doubles starting at
// base + r * stride + offset. Cheap to copy; does not own storage.
struct OutputSlice {
  double* base = nullptr;
  std::size_t rows = 0;
  std::size_t stride = 0;
  std::size_t offset = 0;
  std::size_t width = 0;

  std::span<double> row(TokenId r) const { return {base + r * stride + offset, width}; }
  const double* origin() const { return base + offset; }
};

// Output-side parameters. SKIP/CBOW: one |V| x dim matrix. SSKIP: 2*window
// position-indexed |V| x dim matrices. CWIN: one |V| x (2*window*dim) matrix
// whose column blocks correspond to relative positions.
class OutputParameters {
 public:
  OutputParameters() = default;
  OutputParameters(ModelKind kind, std::size_t vocab_size, std::size_t dim, int window);

  ModelKind kind() const noexcept { return kind_; }
  int window() const noexcept { return window_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t matrix_count() const noexcept { return matrices_.size(); }
  DenseMatrix& matrix(std::size_t i) { return matrices_.at(i); }
  const DenseMatrix& matrix(std::size_t i) const { return matrices_.at(i); }

  // The parameters associated with a relative position. Throws
  // std::out_of_range when position is 0 or |position| > window.
  OutputSlice slice(int relative_position);
  // The full-width matrix used to score a prediction (CBOW/CWIN center, or
  // the position-selected matrix for SKIP/SSKIP).
  OutputSlice prediction_slice(int relative_position);

  bool all_finite() const;

  friend bool operator==(const OutputParameters&, const OutputParameters&) = default;

 private:
  std::size_t block_index(int relative_position) const;

  ModelKind kind_ = ModelKind::Skip;
  std::size_t dim_ = 0;
  int window_ = 0;
  std::vector<DenseMatrix> matrices_;
};

inline OutputSlice select_output_slice(ModelKind kind, int relative_position, OutputParameters& output) {
  if (kind != output.kind()) throw std::invalid_argument("model kind does not match output parameters");
  return output.slice(relative_position);
}

struct ModelParameters {
  ModelKind kind = ModelKind::Skip;
  int window = 3;
  std::size_t dim = 0;
  DenseMatrix input;  // |V| x dim
  OutputParameters output;

  ModelParameters() = default;
  ModelParameters(ModelKind kind, std::size_t vocab_size, std::size_t dim, int window);

  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

// Negative-sampling loss for one observed target:
//   -log s(u_t . h) - sum_k log s(-u_k . h)
// Negatives equal to the target are skipped.
double sgns_loss(std::span<const double> hidden, TokenId target,
                 std::span<const TokenId> negatives, const OutputSlice& output);

// One SGD step on sgns_loss. Output rows are updated in place; the step for
// the hidden vector is accumulated into hidden_update (the caller applies it),
// i.e. hidden_update -= lr * dL/dh. Returns the loss before the update.
double sgns_step(std::span<const double> hidden, std::span<double> hidden_update, TokenId target,
                 std::span<const TokenId> negatives, const OutputSlice& output, double lr);

// Convenience overload drawing n negatives from the table.
double sgns_step(std::span<const double> hidden, std::span<double> hidden_update, TokenId target,
                 const OutputSlice& output, const NegativeTable& table, int negatives, double lr,
                 std::mt19937_64& rng);

// Hidden representation of a window. CBOW: mean of context vectors. CWIN:
// concatenation ordered by relative position with absent slots zero. SKIP and
// SSKIP: the center's own vector. Returns false (skip signal) for an empty
// context under CBOW/CWIN.
bool forward_context(ModelKind kind, TokenId center, std::span<const ContextToken> context,
                     const DenseMatrix& input, int window, std::span<double> hidden);
std::optional<std::vector<double>> forward_context(ModelKind kind, TokenId center,
                                                   std::span<const ContextToken> context,
                                                   const DenseMatrix& input, int window);

// Routes a hidden-vector update back to the input rows that produced it.
void backward_context(ModelKind kind, TokenId center, std::span<const ContextToken> context,
                      std::span<const double> hidden_update, DenseMatrix& input, int window);

// Number of SGNS predictions a window contributes (context size for
// SKIP/SSKIP, 1 for CBOW/CWIN with a non-empty context).
std::size_t prediction_count(ModelKind kind, const Window& window);

// Loss of one window (sum over its predictions), with negatives supplied as
// prediction_count * n ids, n per prediction in order.
double window_loss(const ModelParameters& params, const Window& window,
                   std::span<const TokenId> negatives);

// One SGD step on window_loss. All reads use the pre-step parameters except
// when a row is touched twice within the window.
double train_window(ModelParameters& params, const Window& window,
                    std::span<const TokenId> negatives, double lr, std::vector<double>& scratch);

}  // namespace fnt
