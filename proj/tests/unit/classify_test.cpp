#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fnt/classify.hpp"
#include "fnt/error.hpp"
#include "fnt/evaluate.hpp"
#include "gradcheck.hpp"
#include "synthetic.hpp"

namespace fnt {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

ClassifierConfig lr_config() {
  ClassifierConfig c;
  c.kind = ClassifierKind::LogisticRegression;
  c.learning_rate = 0.1;
  return c;
}

ClassifierConfig mlp_config() {
  ClassifierConfig c;
  c.kind = ClassifierKind::Mlp;
  c.hidden = 32;
  c.epochs = 60;
  c.learning_rate = 0.05;
  return c;
}

template <class Model>
double f1_on(const Model& model, const LabeledData& data, double threshold = 0.5) {
  std::vector<TypeSet> pred;
  for (std::size_t i = 0; i < data.size(); ++i) pred.push_back(predict_labels(predict_proba(model, data.row(i)), threshold));
  return micro_f1(pred, data.labels);
}

TEST(Config, DefaultsAndValidation) {
  ClassifierConfig c;
  EXPECT_EQ(c.resolved_epochs(), 20);
  c.kind = ClassifierKind::Mlp;
  EXPECT_EQ(c.resolved_epochs(), 50);
  EXPECT_DOUBLE_EQ(c.resolved_learning_rate(), 0.01);
  EXPECT_EQ(c.hidden, 100u);
  EXPECT_EQ(c.batch_size, 32u);
  for (double bad : {0.0, 1.0, -0.1}) {
    c.threshold = bad;
    EXPECT_THROW(c.validate(), ConfigError);
  }
  EXPECT_EQ(parse_classifier_kind("MLP"), ClassifierKind::Mlp);
  EXPECT_EQ(to_string(ClassifierKind::LogisticRegression), "LR");
  EXPECT_THROW(parse_classifier_kind("svm"), ConfigError);
}

TEST(PredictLabels, ThresholdIsInclusive) {
  const std::vector<double> p{0.7, 0.5, 0.3};
  auto s = predict_labels(p, 0.5);
  EXPECT_TRUE(s.test(0));
  EXPECT_TRUE(s.test(1));
  EXPECT_FALSE(s.test(2));
  EXPECT_TRUE(predict_labels(std::vector<double>{0.1, 0.2}, 0.5).none());
  EXPECT_EQ(predict_labels(std::vector<double>(4, 0.5), 0.5).count(), 4u);
}

TEST(LinearModel, ZeroModelIsOneHalf) {
  LinearPerTypeModel m(3, 4);
  for (double p : predict_proba(m, std::vector<double>{1.0, -2.0, 5.0})) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(LinearModel, RaisingOneScoreMovesOnlyThatType) {
  LinearPerTypeModel m(2, 3);
  m.weights.row(1)[0] = 1.0;
  const auto lo = predict_proba(m, std::vector<double>{0.5, 0.0});
  const auto hi = predict_proba(m, std::vector<double>{1.5, 0.0});
  EXPECT_GT(hi[1], lo[1]);
  EXPECT_EQ(hi[0], lo[0]);
  EXPECT_EQ(hi[2], lo[2]);
}

TEST(LinearModel, WidthMismatchIsShapeError) {
  LinearPerTypeModel m(3, 1);
  EXPECT_THROW(predict_proba(m, std::vector<double>{1.0}), ShapeError);
}

TEST(TrainLr, SeparableDataIsLearned) {
  const auto train = testing::sign_structured_data(800, 6, 4, false, 0.2, 1);
  const auto test = testing::sign_structured_data(400, 6, 4, false, 0.2, 2);
  const auto m = train_lr(train, lr_config());
  EXPECT_GE(f1_on(m, train), 0.99);
  EXPECT_GE(f1_on(m, test), 0.99);
}

TEST(TrainLr, TwoPointsEndOnOppositeSides) {
  LabeledData d(2, 1);
  TypeSet pos(1), neg(1);
  pos.set(0);
  d.add(std::vector<double>{1.0, 2.0}, pos);
  d.add(std::vector<double>{-1.0, 0.5}, neg);
  auto cfg = lr_config();
  cfg.epochs = 200;
  const auto m = train_lr(d, cfg);
  EXPECT_GT(predict_proba(m, d.row(0))[0], 0.5);
  EXPECT_LT(predict_proba(m, d.row(1))[0], 0.5);
}

TEST(TrainLr, TypeWithoutPositivesIsConstantNegative) {
  LabeledData d(2, 2);
  TypeSet y(2);
  y.set(0);
  d.add(std::vector<double>{1.0, 0.0}, y);
  d.add(std::vector<double>{0.0, 1.0}, TypeSet(2));
  const auto m = train_lr(d, lr_config());
  EXPECT_TRUE(m.constant_negative[1]);
  EXPECT_FALSE(m.constant_negative[0]);
  EXPECT_EQ(predict_proba(m, d.row(0))[1], 0.0);
}

TEST(TrainLr, PermutingTypesPermutesModels) {
  const auto data = testing::sign_structured_data(300, 8, 4, true, 0.1, 3);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  LabeledData permuted(data.dim, data.num_types);
  permuted.features = data.features;
  for (const auto& y : data.labels) {
    TypeSet z(4);
    for (std::size_t t = 0; t < 4; ++t) z.set(t, y.test(perm[t]));
    permuted.labels.push_back(z);
  }
  const auto a = train_lr(data, lr_config());
  const auto b = train_lr(permuted, lr_config());
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(b.bias[t], a.bias[perm[t]]);
    for (std::size_t k = 0; k < data.dim; ++k) EXPECT_EQ(b.weights.row(t)[k], a.weights.row(perm[t])[k]);
  }
}

TEST(TrainLr, ParallelTypesMatchSequential) {
  const auto data = testing::sign_structured_data(200, 6, 3, false, 0.1, 8);
  auto cfg = lr_config();
  const auto a = train_lr(data, cfg);
  cfg.workers = 3;
  const auto b = train_lr(data, cfg);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(TrainLr, LossFallsByAtLeastTenPercent) {
  const auto data = testing::sign_structured_data(500, 6, 4, false, 0.1, 4);
  TrainingHistory h;
  train_lr(data, lr_config(), nullptr, &h);
  const double initial = lr_loss(LinearPerTypeModel(data.dim, data.num_types), data);
  ASSERT_FALSE(h.train_loss.empty());
  EXPECT_LT(h.train_loss.back(), 0.9 * initial);
}

TEST(TrainLr, DevEarlyStoppingKeepsBestEpoch) {
  const auto train = testing::sign_structured_data(300, 6, 4, false, 0.1, 5);
  const auto dev = testing::sign_structured_data(100, 6, 4, false, 0.1, 6);
  auto cfg = lr_config();
  cfg.epochs = 30;
  cfg.patience = 2;
  TrainingHistory h;
  const auto m = train_lr(train, cfg, &dev, &h);
  ASSERT_FALSE(h.dev_micro_f1.empty());
  ASSERT_GE(h.best_epoch, 1);
  const double best = *std::max_element(h.dev_micro_f1.begin(), h.dev_micro_f1.end());
  EXPECT_DOUBLE_EQ(h.dev_micro_f1[static_cast<std::size_t>(h.best_epoch - 1)], best);
  EXPECT_DOUBLE_EQ(f1_on(m, dev), best);
}

TEST(EarlyStopping, ZeroDevScoresDoNotExhaustPatience) {
  // All-negative training labels keep every dev prediction empty.
  auto train = testing::sign_structured_data(120, 4, 2, false, 0.1, 8);
  for (auto& labels : train.labels) labels = TypeSet(labels.size());
  const auto dev = testing::sign_structured_data(40, 4, 2, false, 0.1, 9);
  for (auto cfg : {lr_config(), mlp_config()}) {
    cfg.epochs = 12;
    cfg.patience = 2;
    TrainingHistory h;
    if (cfg.kind == ClassifierKind::Mlp)
      train_mlp(train, cfg, &dev, &h);
    else
      train_lr(train, cfg, &dev, &h);
    EXPECT_EQ(h.dev_micro_f1.size(), 12u);
    for (double f1 : h.dev_micro_f1) EXPECT_EQ(f1, 0.0);
    EXPECT_EQ(h.best_epoch, 1);
  }
}

TEST(Mlp, ZeroOutputWeightsGiveSigmoidOfBias) {
  MlpModel m(3, 4, 2);
  m.w1.row(0)[0] = 2.0;
  m.b2 = {0.3, -1.2};
  const auto p = predict_proba(m, std::vector<double>{0.4, 1.0, -3.0});
  EXPECT_DOUBLE_EQ(p[0], sigmoid(0.3));
  EXPECT_DOUBLE_EQ(p[1], sigmoid(-1.2));
}

TEST(Mlp, GradientMatchesCentralDifferences) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = testing::check_mlp_gradient(seed);
    ASSERT_LT(r.max_relative_error, 1e-4) << "seed " << seed;
    ASSERT_GT(r.coordinates, 0u);
  }
}

TEST(Mlp, ShiftedIdentityReproducesLinearModel) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t dim = 5, types = 3;
  LinearPerTypeModel lin(dim, types);
  for (auto& w : lin.weights.data()) w = u(rng);
  for (auto& b : lin.bias) b = u(rng);

  const double shift = 10.0;  // keeps every hidden unit in the linear regime
  MlpModel mlp(dim, dim, types);
  for (std::size_t i = 0; i < dim; ++i) {
    mlp.w1.row(i)[i] = 1.0;
    mlp.b1[i] = shift;
  }
  for (std::size_t t = 0; t < types; ++t) {
    auto w = lin.weights.row(t);
    std::copy(w.begin(), w.end(), mlp.w2.row(t).begin());
    mlp.b2[t] = lin.bias[t] - shift * std::accumulate(w.begin(), w.end(), 0.0);
  }
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(dim);
    for (auto& v : x) v = 3.0 * u(rng);
    const auto a = predict_proba(lin, x), b = predict_proba(mlp, x);
    for (std::size_t t = 0; t < types; ++t) EXPECT_NEAR(a[t], b[t], 1e-6);
  }
}

TEST(Mlp, PreactivationScalesWithInput) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MlpModel m(4, 3, 2);
  for (auto& w : m.w1.data()) w = u(rng);
  for (auto& b : m.b1) b = u(rng);
  const std::vector<double> x{0.3, -0.7, 1.1, 0.2};
  std::vector<double> cx(x);
  for (auto& v : cx) v *= 2.5;
  const auto h = mlp_hidden_preactivation(m, x), hc = mlp_hidden_preactivation(m, cx);
  for (std::size_t j = 0; j < h.size(); ++j) EXPECT_NEAR(hc[j] - m.b1[j], 2.5 * (h[j] - m.b1[j]), 1e-12);
}

TEST(Mlp, LearnsXorAndLinearData) {
  const auto train = testing::sign_structured_data(1200, 8, 4, true, 0.2, 1);
  const auto test = testing::sign_structured_data(400, 8, 4, true, 0.2, 2);
  const auto m = train_mlp(train, mlp_config());
  EXPECT_GE(f1_on(m, test), 0.95);
  const auto lin = testing::sign_structured_data(800, 6, 4, false, 0.2, 3);
  EXPECT_GE(f1_on(train_mlp(lin, mlp_config()), lin), 0.99);
}

TEST(Mlp, LossFallsByAtLeastTenPercent) {
  const auto data = testing::sign_structured_data(400, 8, 4, true, 0.2, 7);
  auto cfg = mlp_config();
  cfg.epochs = 0;
  const auto initial = train_mlp(data, cfg);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  const double start = mlp_loss(initial, data, all, 0.0);
  cfg.epochs = 20;
  TrainingHistory h;
  train_mlp(data, cfg, nullptr, &h);
  EXPECT_LT(h.train_loss.back(), 0.9 * start);
}

TEST(Mlp, DeterministicAndPure) {
  const auto data = testing::sign_structured_data(200, 4, 2, true, 0.2, 9);
  auto cfg = mlp_config();
  cfg.epochs = 5;
  const auto a = train_mlp(data, cfg), b = train_mlp(data, cfg);
  EXPECT_EQ(a, b);
  EXPECT_EQ(predict_proba(a, data.row(3)), predict_proba(a, data.row(3)));
}

TEST(Mlp, DivergenceIsReported) {
  auto data = testing::sign_structured_data(64, 4, 2, true, 0.2, 9);
  for (auto& v : data.features) v *= 1e150;
  auto cfg = mlp_config();
  cfg.learning_rate = 1e10;
  EXPECT_THROW(train_mlp(data, cfg), DivergenceError);
}

TEST(ClassifierModel, PerTypeMlpAndStandardisation) {
  const auto train = testing::sign_structured_data(600, 6, 3, false, 0.2, 1);
  TypeSystem ts({"x", "y", "z"});
  auto cfg = mlp_config();
  cfg.per_type_mlp = true;
  cfg.standardize = true;
  cfg.epochs = 30;
  const auto model = train_classifier(train, cfg, nullptr, ts);
  EXPECT_EQ(std::get<std::vector<MlpModel>>(model.network()).size(), 3u);
  std::vector<TypeSet> pred;
  for (std::size_t i = 0; i < train.size(); ++i) pred.push_back(model.predict(train.row(i)));
  EXPECT_GE(micro_f1(pred, train.labels), 0.99);
  EXPECT_THROW(model.predict_proba(std::vector<double>{1.0}), ShapeError);
}

TEST(ClassifierModel, SaveLoadRoundTripsEveryNetwork) {
  testing::TempDir dir("clf");
  const auto train = testing::sign_structured_data(200, 4, 2, true, 0.2, 4);
  TypeSystem ts({"p", "q"});
  std::vector<ClassifierConfig> configs{lr_config(), mlp_config(), mlp_config()};
  configs[1].epochs = 3;
  configs[2].epochs = 3;
  configs[2].per_type_mlp = true;
  configs[2].standardize = true;
  for (const auto& cfg : configs) {
    const auto model = train_classifier(train, cfg, nullptr, ts);
    save_classifier(model, dir / "m.txt");
    const auto back = load_classifier(dir / "m.txt");
    EXPECT_EQ(back.type_digest(), ts.digest());
    EXPECT_EQ(back.input_dim(), 4u);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(back.predict_proba(train.row(i)), model.predict_proba(train.row(i)));
  }
  testing::write_lines(dir / "bad.txt", {"something else"});
  EXPECT_THROW(load_classifier(dir / "bad.txt"), FormatError);
}

TEST(ClassifierModel, LabelWidthMustMatchTypeSystem) {
  const auto train = testing::sign_structured_data(20, 4, 2, false, 0.2, 4);
  EXPECT_THROW(train_classifier(train, lr_config(), nullptr, TypeSystem({"only"})), ShapeError);
  EXPECT_THROW(train_lr(LabeledData(4, 2), lr_config()), TrainingError);
}

}  // namespace
}  // namespace fnt
