#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fnt/sgns.hpp"
#include "fnt/type_system.hpp"

namespace fnt {

enum class ClassifierKind { LogisticRegression, Mlp };

std::string_view to_string(ClassifierKind kind);  // "LR" / "MLP"
ClassifierKind parse_classifier_kind(std::string_view name);

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::LogisticRegression;
  // Unset: 20 for LR, 50 for MLP.
  std::optional<int> epochs;
  // Unset: 0.01 for both. LR divides by sqrt(epoch); MLP uses it as-is.
  std::optional<double> learning_rate;
  double l2 = 1e-4;
  std::size_t hidden = 100;
  std::size_t batch_size = 32;
  double momentum = 0.9;
  double threshold = 0.5;
  // Early stopping on dev micro-F1; only active when a dev set is supplied.
  // Epochs count towards patience only once some epoch scored above zero.
  int patience = 5;
  // One single-output network per type instead of one shared network.
  bool per_type_mlp = false;
  // Per-dimension standardisation fitted on the training split.
  bool standardize = false;
  std::uint64_t seed = 1;
  int workers = 1;

  int resolved_epochs() const;
  double resolved_learning_rate() const;
  void validate() const;
};

// Row-major design matrix with multi-label targets.
struct LabeledData {
  std::size_t dim = 0;
  std::size_t num_types = 0;
  std::vector<double> features;
  std::vector<TypeSet> labels;

  LabeledData() = default;
  LabeledData(std::size_t dim_, std::size_t num_types_) : dim(dim_), num_types(num_types_) {}

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
  void add(std::span<const double> x, TypeSet y);
  void add(std::span<const float> x, TypeSet y);
};

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> inv_std;

  static Standardizer fit(const LabeledData& data);
  void apply(std::span<const double> in, std::span<double> out) const;
  LabeledData apply(const LabeledData& data) const;
};

struct LinearPerTypeModel {
  std::size_t dim = 0;
  DenseMatrix weights;  // types x dim
  std::vector<double> bias;
  // Types without positive training examples always predict 0.
  std::vector<bool> constant_negative;
  double l2 = 0.0;

  LinearPerTypeModel() = default;
  LinearPerTypeModel(std::size_t dim_, std::size_t types)
      : dim(dim_), weights(types, dim_), bias(types, 0.0), constant_negative(types, false) {}
  std::size_t num_types() const noexcept { return bias.size(); }
};

struct MlpModel {
  DenseMatrix w1;  // hidden x dim
  std::vector<double> b1;
  DenseMatrix w2;  // types x hidden
  std::vector<double> b2;

  MlpModel() = default;
  MlpModel(std::size_t dim, std::size_t hidden, std::size_t types)
      : w1(hidden, dim), b1(hidden, 0.0), w2(types, hidden), b2(types, 0.0) {}
  std::size_t input_dim() const noexcept { return w1.cols(); }
  std::size_t hidden() const noexcept { return w1.rows(); }
  std::size_t num_types() const noexcept { return w2.rows(); }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct MlpGradient {
  DenseMatrix w1;
  std::vector<double> b1;
  DenseMatrix w2;
  std::vector<double> b2;
};

struct TrainingHistory {
  std::vector<double> train_loss;    // mean per example, per epoch
  std::vector<double> dev_micro_f1;  // empty without a dev set
  int best_epoch = 0;                // 1-based epoch whose parameters were kept
};

// Per-type SGD logistic regression with L2. The example order per epoch is
// shared by all types, so each type's model depends only on its own label
// column. With a dev set the epoch with the best dev micro-F1 is kept.
LinearPerTypeModel train_lr(const LabeledData& train, const ClassifierConfig& config,
                            const LabeledData* dev = nullptr, TrainingHistory* history = nullptr);

// Shared multi-output one-hidden-layer ReLU network, sigmoid outputs, summed
// binary cross-entropy, mini-batch SGD with momentum.
MlpModel train_mlp(const LabeledData& train, const ClassifierConfig& config,
                   const LabeledData* dev = nullptr, TrainingHistory* history = nullptr);

std::vector<double> predict_proba(const LinearPerTypeModel& model, std::span<const double> x);
std::vector<double> predict_proba(const MlpModel& model, std::span<const double> x);
// Pre-activation of the hidden layer, W1 x + b1.
std::vector<double> mlp_hidden_preactivation(const MlpModel& model, std::span<const double> x);

// Bit t set iff proba[t] >= threshold.
TypeSet predict_labels(std::span<const double> proba, double threshold);

// Mean over the batch of the summed per-type cross-entropy, plus
// (l2 / 2) * (|W1|^2 + |W2|^2).
double mlp_loss(const MlpModel& model, const LabeledData& data, std::span<const std::size_t> batch, double l2);
double mlp_loss_and_gradient(const MlpModel& model, const LabeledData& data,
                             std::span<const std::size_t> batch, double l2, MlpGradient& grad);

// Mean per-example summed log loss of a linear model.
double lr_loss(const LinearPerTypeModel& model, const LabeledData& data);

// Trained classifier of either kind plus its input transform.
class ClassifierModel {
 public:
  using Network = std::variant<LinearPerTypeModel, MlpModel, std::vector<MlpModel>>;

  ClassifierModel() = default;
  ClassifierModel(ClassifierConfig config, Network network, std::optional<Standardizer> standardizer,
                  std::size_t input_dim, std::size_t num_types, std::string type_digest);

  const ClassifierConfig& config() const noexcept { return config_; }
  const Network& network() const noexcept { return network_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t num_types() const noexcept { return num_types_; }
  const std::string& type_digest() const noexcept { return type_digest_; }
  const std::optional<Standardizer>& standardizer() const noexcept { return standardizer_; }

  // Throws ShapeError when x has the wrong width.
  std::vector<double> predict_proba(std::span<const double> x) const;
  std::vector<double> predict_proba(std::span<const float> x) const;
  TypeSet predict(std::span<const double> x) const;

 private:
  ClassifierConfig config_;
  Network network_;
  std::optional<Standardizer> standardizer_;
  std::size_t input_dim_ = 0;
  std::size_t num_types_ = 0;
  std::string type_digest_;
};

ClassifierModel train_classifier(const LabeledData& train, const ClassifierConfig& config,
                                 const LabeledData* dev, const TypeSystem& types,
                                 TrainingHistory* history = nullptr);

// Versioned text container ("fnt-classifier 1"); doubles are stored with
// round-trip precision.
void save_classifier(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);

}  // namespace fnt
