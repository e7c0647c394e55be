#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "fnt/classify.hpp"
#include "fnt/error.hpp"
#include "fnt/evaluate.hpp"

namespace fnt {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit_loss(double z, bool label) {
  return std::max(z, 0.0) - (label ? z : 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double uniform(std::mt19937_64& rng, double bound) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * bound;
}

void affine(const DenseMatrix& w, std::span<const double> b, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < w.rows(); ++r) {
    auto row = w.row(r);
    out[r] = std::inner_product(row.begin(), row.end(), x.begin(), b[r]);
  }
}

double squared_norm(const DenseMatrix& m) {
  double s = 0;
  for (double v : m.data()) s += v * v;
  return s;
}

// Forward pass for one example; fills hidden activations and output logits.
void forward(const MlpModel& m, std::span<const double> x, std::vector<double>& pre, std::vector<double>& act,
             std::vector<double>& logits) {
  pre.resize(m.hidden());
  act.resize(m.hidden());
  logits.resize(m.num_types());
  affine(m.w1, m.b1, x, pre);
  for (std::size_t h = 0; h < pre.size(); ++h) act[h] = pre[h] > 0 ? pre[h] : 0.0;
  affine(m.w2, m.b2, act, logits);
}

MlpGradient zero_gradient(const MlpModel& m) {
  return {DenseMatrix(m.w1.rows(), m.w1.cols()), std::vector<double>(m.b1.size(), 0.0),
          DenseMatrix(m.w2.rows(), m.w2.cols()), std::vector<double>(m.b2.size(), 0.0)};
}

MlpModel initial_model(std::size_t dim, std::size_t hidden, std::size_t types, std::uint64_t seed) {
  MlpModel m(dim, hidden, types);
  std::mt19937_64 rng(seed);
  const double b1 = std::sqrt(6.0 / static_cast<double>(dim));
  for (double& v : m.w1.data()) v = uniform(rng, b1);
  const double b2 = std::sqrt(6.0 / static_cast<double>(hidden + types));
  for (double& v : m.w2.data()) v = uniform(rng, b2);
  return m;
}

bool finite(const MlpModel& m) {
  auto ok = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return ok(m.w1.data()) && ok(m.b1) && ok(m.w2.data()) && ok(m.b2);
}

}  // namespace

std::vector<double> mlp_hidden_preactivation(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim()) throw ShapeError("input width does not match MLP");
  std::vector<double> pre(model.hidden());
  affine(model.w1, model.b1, x, pre);
  return pre;
}

std::vector<double> predict_proba(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim())
    throw ShapeError("input width " + std::to_string(x.size()) + " != model width " +
                     std::to_string(model.input_dim()));
  std::vector<double> pre, act, logits;
  forward(model, x, pre, act, logits);
  for (auto& z : logits) z = sigmoid(z);
  return logits;
}

double mlp_loss(const MlpModel& model, const LabeledData& data, std::span<const std::size_t> batch, double l2) {
  if (batch.empty()) return 0.0;
  std::vector<double> pre, act, logits;
  double total = 0;
  for (auto i : batch) {
    forward(model, data.row(i), pre, act, logits);
    for (std::size_t t = 0; t < logits.size(); ++t) total += logit_loss(logits[t], data.labels[i].test(t));
  }
  return total / static_cast<double>(batch.size()) +
         0.5 * l2 * (squared_norm(model.w1) + squared_norm(model.w2));
}

double mlp_loss_and_gradient(const MlpModel& model, const LabeledData& data, std::span<const std::size_t> batch,
                             double l2, MlpGradient& grad) {
  grad = zero_gradient(model);
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<double> pre, act, logits, delta_out(model.num_types()), delta_hidden(model.hidden());
  double total = 0;
  for (auto i : batch) {
    auto x = data.row(i);
    forward(model, x, pre, act, logits);
    for (std::size_t t = 0; t < logits.size(); ++t) {
      const bool y = data.labels[i].test(t);
      total += logit_loss(logits[t], y);
      delta_out[t] = (sigmoid(logits[t]) - (y ? 1.0 : 0.0)) * scale;
    }
    std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
    for (std::size_t t = 0; t < delta_out.size(); ++t) {
      auto w2 = model.w2.row(t);
      auto g2 = grad.w2.row(t);
      for (std::size_t h = 0; h < act.size(); ++h) {
        g2[h] += delta_out[t] * act[h];
        delta_hidden[h] += delta_out[t] * w2[h];
      }
      grad.b2[t] += delta_out[t];
    }
    for (std::size_t h = 0; h < delta_hidden.size(); ++h) {
      if (pre[h] <= 0) continue;
      auto g1 = grad.w1.row(h);
      for (std::size_t d = 0; d < x.size(); ++d) g1[d] += delta_hidden[h] * x[d];
      grad.b1[h] += delta_hidden[h];
    }
  }
  if (l2 > 0) {
    for (std::size_t k = 0; k < grad.w1.data().size(); ++k) grad.w1.data()[k] += l2 * model.w1.data()[k];
    for (std::size_t k = 0; k < grad.w2.data().size(); ++k) grad.w2.data()[k] += l2 * model.w2.data()[k];
  }
  return total * scale + 0.5 * l2 * (squared_norm(model.w1) + squared_norm(model.w2));
}

MlpModel train_mlp(const LabeledData& train, const ClassifierConfig& config, const LabeledData* dev,
                   TrainingHistory* history) {
  config.validate();
  if (train.empty()) throw TrainingError("classifier training set is empty");
  MlpModel model = initial_model(train.dim, config.hidden, train.num_types, config.seed);
  MlpGradient velocity = zero_gradient(model);
  MlpGradient grad;

  TrainingHistory local;
  const bool use_dev = dev && !dev->empty();
  MlpModel best = model;
  double best_f1 = -1.0;
  int since_best = 0;
  const double lr = config.resolved_learning_rate();
  const double mu = config.momentum;
  std::mt19937_64 rng(config.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  auto step = [&](std::span<double> param, std::span<double> vel, std::span<const double> g) {
    for (std::size_t k = 0; k < param.size(); ++k) {
      vel[k] = mu * vel[k] - lr * g[k];
      param[k] += vel[k];
    }
  };

  for (int epoch = 1; epoch <= config.resolved_epochs(); ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      const double loss = mlp_loss_and_gradient(model, train, batch, config.l2, grad);
      if (!std::isfinite(loss))
        throw DivergenceError("MLP loss became non-finite at epoch " + std::to_string(epoch) +
                              " (learning rate " + std::to_string(lr) + ")");
      epoch_loss += loss * static_cast<double>(batch.size());
      step(model.w1.data(), velocity.w1.data(), grad.w1.data());
      step(model.b1, velocity.b1, grad.b1);
      step(model.w2.data(), velocity.w2.data(), grad.w2.data());
      step(model.b2, velocity.b2, grad.b2);
    }
    if (!finite(model)) throw DivergenceError("MLP parameters became non-finite at epoch " + std::to_string(epoch));
    local.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));

    if (use_dev) {
      std::vector<TypeSet> preds;
      preds.reserve(dev->size());
      for (std::size_t i = 0; i < dev->size(); ++i)
        preds.push_back(predict_labels(predict_proba(model, dev->row(i)), config.threshold));
      const double f1 = micro_f1(preds, dev->labels);
      local.dev_micro_f1.push_back(f1);
      if (f1 > best_f1) {
        best_f1 = f1;
        best = model;
        local.best_epoch = epoch;
        since_best = 0;
      } else if (best_f1 > 0.0 && ++since_best >= config.patience) {
        spdlog::debug("MLP early stop at epoch {} (best {})", epoch, local.best_epoch);
        break;
      }
    } else {
      local.best_epoch = epoch;
    }
  }
  if (use_dev && local.best_epoch > 0) model = std::move(best);
  if (history) *history = std::move(local);
  return model;
}

}  // namespace fnt
