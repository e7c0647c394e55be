#include "fnt/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "fnt/error.hpp"
#include "fnt/evaluate.hpp"

namespace fnt {

std::string_view to_string(ClassifierKind kind) {
  return kind == ClassifierKind::LogisticRegression ? "LR" : "MLP";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  const auto n = to_lower_ascii(name);
  if (n == "lr") return ClassifierKind::LogisticRegression;
  if (n == "mlp") return ClassifierKind::Mlp;
  throw ConfigError("unknown classifier '" + std::string(name) + "' (expected lr|mlp)");
}

int ClassifierConfig::resolved_epochs() const {
  if (epochs) return *epochs;
  return kind == ClassifierKind::LogisticRegression ? 20 : 50;
}

double ClassifierConfig::resolved_learning_rate() const { return learning_rate.value_or(0.01); }

void ClassifierConfig::validate() const {
  if (resolved_epochs() < 0) throw ConfigError("classifier epochs must be non-negative");
  if (!(resolved_learning_rate() > 0)) throw ConfigError("classifier learning rate must be positive");
  if (l2 < 0) throw ConfigError("l2 must be non-negative");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("decision threshold must lie in (0, 1)");
  if (kind == ClassifierKind::Mlp && hidden == 0) throw ConfigError("hidden width must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must lie in [0, 1)");
  if (workers < 1) throw ConfigError("workers must be positive");
}

void LabeledData::add(std::span<const double> x, TypeSet y) {
  if (x.size() != dim) throw ShapeError("feature width " + std::to_string(x.size()) + " != " + std::to_string(dim));
  if (y.size() != num_types) throw ShapeError("label width does not match the type system");
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(std::move(y));
}

void LabeledData::add(std::span<const float> x, TypeSet y) {
  std::vector<double> row(x.begin(), x.end());
  add(std::span<const double>(row), std::move(y));
}

Standardizer Standardizer::fit(const LabeledData& data) {
  Standardizer s;
  s.mean.assign(data.dim, 0.0);
  s.inv_std.assign(data.dim, 1.0);
  if (data.empty()) return s;
  const double n = static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.row(i);
    for (std::size_t d = 0; d < data.dim; ++d) s.mean[d] += x[d];
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> var(data.dim, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.row(i);
    for (std::size_t d = 0; d < data.dim; ++d) var[d] += (x[d] - s.mean[d]) * (x[d] - s.mean[d]);
  }
  for (std::size_t d = 0; d < data.dim; ++d) {
    const double sd = std::sqrt(var[d] / n);
    s.inv_std[d] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t d = 0; d < in.size(); ++d) out[d] = (in[d] - mean[d]) * inv_std[d];
}

LabeledData Standardizer::apply(const LabeledData& data) const {
  LabeledData out(data.dim, data.num_types);
  out.features.resize(data.features.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    apply(data.row(i), std::span<double>(out.features.data() + i * data.dim, data.dim));
  out.labels = data.labels;
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Binary cross-entropy of a logit, numerically stable.
double logit_loss(double z, bool label) {
  return std::max(z, 0.0) - (label ? z : 0.0) + std::log1p(std::exp(-std::abs(z)));
}

std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

template <class Predict>
double dev_micro_f1(const LabeledData& dev, double threshold, Predict&& predict) {
  std::vector<TypeSet> preds;
  preds.reserve(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) preds.push_back(predict_labels(predict(dev.row(i)), threshold));
  return micro_f1(preds, dev.labels);
}

void check_training_data(const LabeledData& train) {
  if (train.empty()) throw TrainingError("classifier training set is empty");
  if (train.features.size() != train.size() * train.dim) throw ShapeError("inconsistent training matrix");
}

}  // namespace

double lr_loss(const LinearPerTypeModel& model, const LabeledData& data) {
  if (data.empty()) return 0.0;
  double total = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.row(i);
    for (std::size_t t = 0; t < model.num_types(); ++t) {
      if (model.constant_negative[t]) continue;
      auto w = model.weights.row(t);
      const double z = std::inner_product(w.begin(), w.end(), x.begin(), model.bias[t]);
      total += logit_loss(z, data.labels[i].test(t));
    }
  }
  return total / static_cast<double>(data.size());
}

LinearPerTypeModel train_lr(const LabeledData& train, const ClassifierConfig& config, const LabeledData* dev,
                            TrainingHistory* history) {
  config.validate();
  check_training_data(train);
  const std::size_t types = train.num_types;
  LinearPerTypeModel model(train.dim, types);
  model.l2 = config.l2;

  for (std::size_t t = 0; t < types; ++t) {
    bool any = false;
    for (const auto& y : train.labels) any = any || y.test(t);
    if (!any) {
      model.constant_negative[t] = true;
      spdlog::warn("type {} has no positive training example; using a constant-negative model", t);
    }
  }

  TrainingHistory local;
  const bool use_dev = dev && !dev->empty();
  LinearPerTypeModel best = model;
  double best_f1 = -1.0;
  int since_best = 0;
  std::mt19937_64 rng(config.seed);
  const int epochs = config.resolved_epochs();
  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(types)));

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    const auto order = shuffled(train.size(), rng);
    const double lr = config.resolved_learning_rate() / std::sqrt(static_cast<double>(epoch));

    auto fit_types = [&](std::size_t first, std::size_t last) {
      for (std::size_t t = first; t < last; ++t) {
        if (model.constant_negative[t]) continue;
        auto w = model.weights.row(t);
        double& b = model.bias[t];
        for (auto i : order) {
          auto x = train.row(i);
          const double z = std::inner_product(w.begin(), w.end(), x.begin(), b);
          const double g = sigmoid(z) - (train.labels[i].test(t) ? 1.0 : 0.0);
          for (std::size_t d = 0; d < w.size(); ++d) w[d] -= lr * (g * x[d] + config.l2 * w[d]);
          b -= lr * g;
        }
      }
    };
    if (workers == 1) {
      fit_types(0, types);
    } else {
      std::vector<std::jthread> threads;
      for (int k = 0; k < workers; ++k)
        threads.emplace_back(fit_types, types * k / workers, types * (k + 1) / workers);
    }

    const double loss = lr_loss(model, train);
    if (!std::isfinite(loss)) throw DivergenceError("LR training diverged at epoch " + std::to_string(epoch));
    local.train_loss.push_back(loss);

    if (use_dev) {
      const double f1 = dev_micro_f1(*dev, config.threshold,
                                     [&](std::span<const double> x) { return predict_proba(model, x); });
      local.dev_micro_f1.push_back(f1);
      if (f1 > best_f1) {
        best_f1 = f1;
        best = model;
        local.best_epoch = epoch;
        since_best = 0;
      } else if (best_f1 > 0.0 && ++since_best >= config.patience) {
        spdlog::debug("LR early stop at epoch {} (best {})", epoch, local.best_epoch);
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

std::vector<double> predict_proba(const LinearPerTypeModel& model, std::span<const double> x) {
  if (x.size() != model.dim)
    throw ShapeError("input width " + std::to_string(x.size()) + " != model width " + std::to_string(model.dim));
  std::vector<double> p(model.num_types());
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (model.constant_negative[t]) continue;
    auto w = model.weights.row(t);
    p[t] = sigmoid(std::inner_product(w.begin(), w.end(), x.begin(), model.bias[t]));
  }
  return p;
}

TypeSet predict_labels(std::span<const double> proba, double threshold) {
  TypeSet set(proba.size());
  for (std::size_t t = 0; t < proba.size(); ++t)
    if (proba[t] >= threshold) set.set(t);
  return set;
}

ClassifierModel::ClassifierModel(ClassifierConfig config, Network network, std::optional<Standardizer> standardizer,
                                 std::size_t input_dim, std::size_t num_types, std::string type_digest)
    : config_(std::move(config)), network_(std::move(network)), standardizer_(std::move(standardizer)),
      input_dim_(input_dim), num_types_(num_types), type_digest_(std::move(type_digest)) {}

std::vector<double> ClassifierModel::predict_proba(std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw ShapeError("input width " + std::to_string(x.size()) + " != model width " + std::to_string(input_dim_));
  std::vector<double> scaled;
  if (standardizer_) {
    scaled.resize(x.size());
    standardizer_->apply(x, scaled);
    x = scaled;
  }
  if (auto* lr = std::get_if<LinearPerTypeModel>(&network_)) return fnt::predict_proba(*lr, x);
  if (auto* mlp = std::get_if<MlpModel>(&network_)) return fnt::predict_proba(*mlp, x);
  const auto& nets = std::get<std::vector<MlpModel>>(network_);
  std::vector<double> p;
  p.reserve(nets.size());
  for (const auto& net : nets) p.push_back(fnt::predict_proba(net, x).front());
  return p;
}

std::vector<double> ClassifierModel::predict_proba(std::span<const float> x) const {
  std::vector<double> row(x.begin(), x.end());
  return predict_proba(std::span<const double>(row));
}

TypeSet ClassifierModel::predict(std::span<const double> x) const {
  return predict_labels(predict_proba(x), config_.threshold);
}

ClassifierModel train_classifier(const LabeledData& train, const ClassifierConfig& config, const LabeledData* dev,
                                 const TypeSystem& types, TrainingHistory* history) {
  config.validate();
  if (train.num_types != types.size()) throw ShapeError("training labels do not match the type system");

  std::optional<Standardizer> standardizer;
  LabeledData scaled_train, scaled_dev;
  const LabeledData* tr = &train;
  const LabeledData* dv = dev;
  if (config.standardize) {
    standardizer = Standardizer::fit(train);
    scaled_train = standardizer->apply(train);
    tr = &scaled_train;
    if (dev) {
      scaled_dev = standardizer->apply(*dev);
      dv = &scaled_dev;
    }
  }

  ClassifierModel::Network network;
  if (config.kind == ClassifierKind::LogisticRegression) {
    network = train_lr(*tr, config, dv, history);
  } else if (!config.per_type_mlp) {
    network = train_mlp(*tr, config, dv, history);
  } else {
    std::vector<MlpModel> nets;
    auto column = [](const LabeledData& d, std::size_t t) {
      LabeledData out(d.dim, 1);
      out.features = d.features;
      for (const auto& y : d.labels) {
        TypeSet one(1);
        one.set(0, y.test(t));
        out.labels.push_back(one);
      }
      return out;
    };
    for (std::size_t t = 0; t < types.size(); ++t) {
      auto tr_t = column(*tr, t);
      LabeledData dv_t;
      if (dv) dv_t = column(*dv, t);
      auto cfg = config;
      cfg.seed = config.seed + t;
      nets.push_back(train_mlp(tr_t, cfg, dv ? &dv_t : nullptr, nullptr));
    }
    network = std::move(nets);
  }
  return ClassifierModel(config, std::move(network), std::move(standardizer), train.dim, types.size(),
                         types.digest());
}

namespace {

void write_vector(std::ostream& out, std::string_view name, std::span<const double> v) {
  out << name << ' ' << v.size();
  for (double x : v) out << ' ' << x;
  out << '\n';
}

void write_matrix(std::ostream& out, std::string_view name, const DenseMatrix& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols();
  for (double x : m.data()) out << ' ' << x;
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw FormatError("unexpected end of classifier file");
    return w;
  }
  void expect(std::string_view tag) {
    auto w = word();
    if (w != tag) throw FormatError("expected '" + std::string(tag) + "', found '" + w + "'");
  }
  template <class T>
  T number() {
    T v{};
    if (!(in_ >> v)) throw FormatError("malformed number in classifier file");
    return v;
  }
  std::vector<double> vector(std::string_view tag) {
    expect(tag);
    std::vector<double> v(number<std::size_t>());
    for (auto& x : v) x = number<double>();
    return v;
  }
  DenseMatrix matrix(std::string_view tag) {
    expect(tag);
    const auto rows = number<std::size_t>();
    const auto cols = number<std::size_t>();
    DenseMatrix m(rows, cols);
    for (auto& x : m.data()) x = number<double>();
    return m;
  }

 private:
  std::istream& in_;
};

void write_mlp(std::ostream& out, const MlpModel& m) {
  write_matrix(out, "w1", m.w1);
  write_vector(out, "b1", m.b1);
  write_matrix(out, "w2", m.w2);
  write_vector(out, "b2", m.b2);
}

MlpModel read_mlp(Reader& r) {
  MlpModel m;
  m.w1 = r.matrix("w1");
  m.b1 = r.vector("b1");
  m.w2 = r.matrix("w2");
  m.b2 = r.vector("b2");
  if (m.b1.size() != m.w1.rows() || m.w2.cols() != m.w1.rows() || m.b2.size() != m.w2.rows())
    throw FormatError("inconsistent MLP shapes in classifier file");
  return m;
}

}  // namespace

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  const auto& c = model.config();
  out << "fnt-classifier 1\n";
  out << "kind " << to_string(c.kind) << '\n';
  out << "input_dim " << model.input_dim() << "\nnum_types " << model.num_types() << '\n';
  out << "type_digest " << model.type_digest() << '\n';
  out << "config epochs " << c.resolved_epochs() << " lr " << c.resolved_learning_rate() << " l2 " << c.l2
      << " hidden " << c.hidden << " batch " << c.batch_size << " momentum " << c.momentum << " threshold "
      << c.threshold << " patience " << c.patience << " per_type_mlp " << c.per_type_mlp << " seed " << c.seed
      << '\n';
  if (const auto& s = model.standardizer()) {
    out << "standardizer 1\n";
    write_vector(out, "mean", s->mean);
    write_vector(out, "inv_std", s->inv_std);
  } else {
    out << "standardizer 0\n";
  }
  const auto& net = model.network();
  if (auto* lr = std::get_if<LinearPerTypeModel>(&net)) {
    out << "network linear\n";
    write_matrix(out, "weights", lr->weights);
    write_vector(out, "bias", lr->bias);
    out << "constant_negative " << lr->constant_negative.size();
    for (bool b : lr->constant_negative) out << ' ' << (b ? 1 : 0);
    out << '\n';
  } else if (auto* mlp = std::get_if<MlpModel>(&net)) {
    out << "network mlp\n";
    write_mlp(out, *mlp);
  } else {
    const auto& nets = std::get<std::vector<MlpModel>>(net);
    out << "network mlp_per_type " << nets.size() << '\n';
    for (const auto& m : nets) write_mlp(out, m);
  }
  out << "end\n";
  if (!out) throw IoError("error while writing " + path.string());
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  Reader r(in);
  r.expect("fnt-classifier");
  if (r.number<int>() != 1) throw FormatError("unsupported classifier file version");
  ClassifierConfig c;
  r.expect("kind");
  c.kind = parse_classifier_kind(r.word());
  r.expect("input_dim");
  const auto input_dim = r.number<std::size_t>();
  r.expect("num_types");
  const auto num_types = r.number<std::size_t>();
  r.expect("type_digest");
  auto digest = r.word();
  r.expect("config");
  r.expect("epochs");
  c.epochs = r.number<int>();
  r.expect("lr");
  c.learning_rate = r.number<double>();
  r.expect("l2");
  c.l2 = r.number<double>();
  r.expect("hidden");
  c.hidden = r.number<std::size_t>();
  r.expect("batch");
  c.batch_size = r.number<std::size_t>();
  r.expect("momentum");
  c.momentum = r.number<double>();
  r.expect("threshold");
  c.threshold = r.number<double>();
  r.expect("patience");
  c.patience = r.number<int>();
  r.expect("per_type_mlp");
  c.per_type_mlp = r.number<int>() != 0;
  r.expect("seed");
  c.seed = r.number<std::uint64_t>();

  std::optional<Standardizer> standardizer;
  r.expect("standardizer");
  if (r.number<int>()) {
    Standardizer s;
    s.mean = r.vector("mean");
    s.inv_std = r.vector("inv_std");
    c.standardize = true;
    standardizer = std::move(s);
  }

  ClassifierModel::Network network;
  r.expect("network");
  const auto kind = r.word();
  if (kind == "linear") {
    LinearPerTypeModel m;
    m.weights = r.matrix("weights");
    m.bias = r.vector("bias");
    r.expect("constant_negative");
    m.constant_negative.resize(r.number<std::size_t>());
    for (std::size_t i = 0; i < m.constant_negative.size(); ++i) m.constant_negative[i] = r.number<int>() != 0;
    m.dim = m.weights.cols();
    m.l2 = c.l2;
    if (m.bias.size() != m.weights.rows() || m.constant_negative.size() != m.bias.size())
      throw FormatError("inconsistent linear model shapes in classifier file");
    network = std::move(m);
  } else if (kind == "mlp") {
    network = read_mlp(r);
  } else if (kind == "mlp_per_type") {
    std::vector<MlpModel> nets(r.number<std::size_t>());
    for (auto& m : nets) m = read_mlp(r);
    network = std::move(nets);
  } else {
    throw FormatError("unknown network kind '" + kind + "'");
  }
  r.expect("end");
  return ClassifierModel(c, std::move(network), std::move(standardizer), input_dim, num_types, digest);
}

}  // namespace fnt
