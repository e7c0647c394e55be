#include "fnt/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fnt/error.hpp"

namespace fnt {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Skip: return "skip";
    case ModelKind::Cbow: return "cbow";
    case ModelKind::StructuredSkip: return "sskip";
    case ModelKind::ContinuousWindow: return "cwin";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  const auto n = to_lower_ascii(name);
  if (n == "skip" || n == "skipgram") return ModelKind::Skip;
  if (n == "cbow") return ModelKind::Cbow;
  if (n == "sskip" || n == "structured-skipgram") return ModelKind::StructuredSkip;
  if (n == "cwin" || n == "cwindow") return ModelKind::ContinuousWindow;
  throw ConfigError("unknown model kind '" + std::string(name) + "' (expected skip|cbow|sskip|cwin)");
}

std::size_t hidden_width(ModelKind kind, std::size_t dim, int window) {
  return kind == ModelKind::ContinuousWindow ? 2 * static_cast<std::size_t>(window) * dim : dim;
}

double clamped_sigmoid(double x) {
  x = std::clamp(x, -kSigmoidClamp, kSigmoidClamp);
  return 1.0 / (1.0 + std::exp(-x));
}

namespace {

// log s(x) on the clamped domain.
double log_sigmoid(double x) {
  x = std::clamp(x, -kSigmoidClamp, kSigmoidClamp);
  return -std::log1p(std::exp(-x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

OutputParameters::OutputParameters(ModelKind kind, std::size_t vocab_size, std::size_t dim, int window)
    : kind_(kind), dim_(dim), window_(window) {
  if (window < 1) throw ConfigError("window must be positive");
  if (dim < 1) throw ConfigError("dim must be positive");
  switch (kind) {
    case ModelKind::Skip:
    case ModelKind::Cbow:
      matrices_.emplace_back(vocab_size, dim);
      break;
    case ModelKind::StructuredSkip:
      for (int i = 0; i < 2 * window; ++i) matrices_.emplace_back(vocab_size, dim);
      break;
    case ModelKind::ContinuousWindow:
      matrices_.emplace_back(vocab_size, hidden_width(kind, dim, window));
      break;
  }
}

std::size_t OutputParameters::block_index(int p) const {
  if (p == 0 || p < -window_ || p > window_)
    throw std::out_of_range("relative position " + std::to_string(p) + " outside window " +
                            std::to_string(window_));
  return static_cast<std::size_t>(p < 0 ? p + window_ : p + window_ - 1);
}

OutputSlice OutputParameters::slice(int relative_position) {
  const auto block = block_index(relative_position);
  switch (kind_) {
    case ModelKind::Skip:
    case ModelKind::Cbow: {
      auto& m = matrices_.front();
      return {m.data().data(), m.rows(), m.cols(), 0, m.cols()};
    }
    case ModelKind::StructuredSkip: {
      auto& m = matrices_[block];
      return {m.data().data(), m.rows(), m.cols(), 0, m.cols()};
    }
    case ModelKind::ContinuousWindow: {
      auto& m = matrices_.front();
      return {m.data().data(), m.rows(), m.cols(), block * dim_, dim_};
    }
  }
  throw std::logic_error("unreachable");
}

OutputSlice OutputParameters::prediction_slice(int relative_position) {
  if (predicts_context(kind_)) return slice(relative_position);
  auto& m = matrices_.front();
  return {m.data().data(), m.rows(), m.cols(), 0, m.cols()};
}

bool OutputParameters::all_finite() const {
  for (const auto& m : matrices_)
    for (double v : m.data())
      if (!std::isfinite(v)) return false;
  return true;
}

ModelParameters::ModelParameters(ModelKind kind_, std::size_t vocab_size, std::size_t dim_, int window_)
    : kind(kind_), window(window_), dim(dim_), input(vocab_size, dim_),
      output(kind_, vocab_size, dim_, window_) {}

double sgns_loss(std::span<const double> hidden, TokenId target, std::span<const TokenId> negatives,
                 const OutputSlice& output) {
  double loss = -log_sigmoid(dot(output.row(target), hidden));
  for (TokenId neg : negatives) {
    if (neg == target) continue;
    loss -= log_sigmoid(-dot(output.row(neg), hidden));
  }
  return loss;
}

double sgns_step(std::span<const double> hidden, std::span<double> hidden_update, TokenId target,
                 std::span<const TokenId> negatives, const OutputSlice& output, double lr) {
  double loss = 0;
  auto apply = [&](TokenId id, double label) {
    auto u = output.row(id);
    const double f = dot(u, hidden);
    loss -= label > 0 ? log_sigmoid(f) : log_sigmoid(-f);
    const double g = (label - clamped_sigmoid(f)) * lr;
    for (std::size_t i = 0; i < u.size(); ++i) hidden_update[i] += g * u[i];
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += g * hidden[i];
  };
  apply(target, 1.0);
  for (TokenId neg : negatives)
    if (neg != target) apply(neg, 0.0);
  return loss;
}

double sgns_step(std::span<const double> hidden, std::span<double> hidden_update, TokenId target,
                 const OutputSlice& output, const NegativeTable& table, int negatives, double lr,
                 std::mt19937_64& rng) {
  std::vector<TokenId> drawn(static_cast<std::size_t>(std::max(negatives, 0)));
  for (auto& id : drawn) id = table.sample(rng());
  return sgns_step(hidden, hidden_update, target, drawn, output, lr);
}

bool forward_context(ModelKind kind, TokenId center, std::span<const ContextToken> context,
                     const DenseMatrix& input, int window, std::span<double> hidden) {
  const std::size_t dim = input.cols();
  std::fill(hidden.begin(), hidden.end(), 0.0);
  switch (kind) {
    case ModelKind::Skip:
    case ModelKind::StructuredSkip: {
      auto v = input.row(center);
      std::copy(v.begin(), v.end(), hidden.begin());
      return true;
    }
    case ModelKind::Cbow: {
      if (context.empty()) return false;
      for (const auto& c : context) {
        auto v = input.row(c.id);
        for (std::size_t i = 0; i < dim; ++i) hidden[i] += v[i];
      }
      const double inv = 1.0 / static_cast<double>(context.size());
      for (std::size_t i = 0; i < dim; ++i) hidden[i] *= inv;
      return true;
    }
    case ModelKind::ContinuousWindow: {
      if (context.empty()) return false;
      for (const auto& c : context) {
        if (c.offset == 0 || c.offset < -window || c.offset > window)
          throw std::out_of_range("context offset outside window");
        const auto block = static_cast<std::size_t>(c.offset < 0 ? c.offset + window : c.offset + window - 1);
        auto v = input.row(c.id);
        std::copy(v.begin(), v.end(), hidden.begin() + static_cast<std::ptrdiff_t>(block * dim));
      }
      return true;
    }
  }
  return false;
}

std::optional<std::vector<double>> forward_context(ModelKind kind, TokenId center,
                                                   std::span<const ContextToken> context,
                                                   const DenseMatrix& input, int window) {
  std::vector<double> hidden(hidden_width(kind, input.cols(), window));
  if (!forward_context(kind, center, context, input, window, hidden)) return std::nullopt;
  return hidden;
}

void backward_context(ModelKind kind, TokenId center, std::span<const ContextToken> context,
                      std::span<const double> hidden_update, DenseMatrix& input, int window) {
  const std::size_t dim = input.cols();
  switch (kind) {
    case ModelKind::Skip:
    case ModelKind::StructuredSkip: {
      auto v = input.row(center);
      for (std::size_t i = 0; i < dim; ++i) v[i] += hidden_update[i];
      return;
    }
    case ModelKind::Cbow: {
      if (context.empty()) return;
      const double inv = 1.0 / static_cast<double>(context.size());
      for (const auto& c : context) {
        auto v = input.row(c.id);
        for (std::size_t i = 0; i < dim; ++i) v[i] += hidden_update[i] * inv;
      }
      return;
    }
    case ModelKind::ContinuousWindow: {
      for (const auto& c : context) {
        const auto block = static_cast<std::size_t>(c.offset < 0 ? c.offset + window : c.offset + window - 1);
        auto v = input.row(c.id);
        for (std::size_t i = 0; i < dim; ++i) v[i] += hidden_update[block * dim + i];
      }
      return;
    }
  }
}

std::size_t prediction_count(ModelKind kind, const Window& window) {
  if (predicts_context(kind)) return window.context.size();
  return window.context.empty() ? 0 : 1;
}

double window_loss(const ModelParameters& params, const Window& window,
                   std::span<const TokenId> negatives) {
  // prediction_slice is non-const only because slices expose mutable rows.
  auto& output = const_cast<OutputParameters&>(params.output);
  const auto per = params.kind == ModelKind::Skip || params.kind == ModelKind::StructuredSkip
                       ? (window.context.empty() ? 0 : negatives.size() / window.context.size())
                       : negatives.size();
  double loss = 0;
  if (predicts_context(params.kind)) {
    auto h = params.input.row(window.center);
    for (std::size_t k = 0; k < window.context.size(); ++k) {
      const auto& c = window.context[k];
      loss += sgns_loss(h, c.id, negatives.subspan(k * per, per), output.prediction_slice(c.offset));
    }
    return loss;
  }
  auto hidden = forward_context(params.kind, window.center, window.context, params.input, params.window);
  if (!hidden) return 0.0;
  return sgns_loss(*hidden, window.center, negatives, output.prediction_slice(0));
}

double train_window(ModelParameters& params, const Window& window, std::span<const TokenId> negatives,
                    double lr, std::vector<double>& scratch) {
  const auto width = hidden_width(params.kind, params.dim, params.window);
  scratch.resize(2 * width);
  std::span<double> hidden(scratch.data(), width);
  std::span<double> update(scratch.data() + width, width);
  std::fill(update.begin(), update.end(), 0.0);

  if (!forward_context(params.kind, window.center, window.context, params.input, params.window, hidden))
    return 0.0;

  double loss = 0;
  if (predicts_context(params.kind)) {
    if (window.context.empty()) return 0.0;
    const auto per = negatives.size() / window.context.size();
    for (std::size_t k = 0; k < window.context.size(); ++k) {
      const auto& c = window.context[k];
      loss += sgns_step(hidden, update, c.id, negatives.subspan(k * per, per),
                        params.output.prediction_slice(c.offset), lr);
    }
  } else {
    loss = sgns_step(hidden, update, window.center, negatives, params.output.prediction_slice(0), lr);
  }
  backward_context(params.kind, window.center, window.context, update, params.input, params.window);
  return loss;
}

}  // namespace fnt
