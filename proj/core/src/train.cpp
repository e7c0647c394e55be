#include "fnt/train.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "fnt/error.hpp"

namespace fnt {

double TrainingConfig::resolved_initial_lr() const {
  if (initial_lr) return *initial_lr;
  return predicts_context(model) ? 0.025 : 0.05;
}

double TrainingConfig::resolved_min_lr() const {
  return min_lr ? *min_lr : resolved_initial_lr() * 1e-4;
}

void TrainingConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be at least 1");
  if (window < 1) throw ConfigError("window must be positive");
  if (negatives < 0) throw ConfigError("negatives must be non-negative");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (workers < 1) throw ConfigError("workers must be positive");
  if (!(resolved_initial_lr() > 0)) throw ConfigError("initial learning rate must be positive");
  if (resolved_min_lr() < 0 || resolved_min_lr() > resolved_initial_lr())
    throw ConfigError("min_lr must lie in [0, initial_lr]");
  if (subsample < 0) throw ConfigError("subsample threshold must be non-negative");
}

std::string TrainingConfig::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "model=" << to_string(model) << ";dim=" << dim << ";window=" << window
     << ";negatives=" << negatives << ";epochs=" << epochs << ";lr=" << resolved_initial_lr()
     << ";min_lr=" << resolved_min_lr() << ";seed=" << seed << ";dynamic=" << dynamic_window
     << ";subsample=" << subsample;
  return os.str();
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t worker_seed(std::uint64_t seed, int worker) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(worker + 1));
}

bool all_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

EmbeddingTrainer::EmbeddingTrainer(TrainingConfig config, const Vocabulary& vocab, const NegativeTable& table)
    : config_(std::move(config)), vocab_(&vocab), table_(&table) {
  config_.validate();
  if (vocab.empty()) throw ConfigError("cannot train on an empty vocabulary");
  if (table.size() == 0 && config_.negatives > 0) throw ConfigError("negative table is empty");
  params_ = ModelParameters(config_.model, vocab.size(), config_.dim, config_.window);
  std::mt19937_64 rng(config_.seed);
  const double scale = 1.0 / static_cast<double>(config_.dim);
  for (double& v : params_.input.data()) v = (uniform01(rng) - 0.5) * scale;
}

TrainingReport EmbeddingTrainer::run(const EncodedCorpus& corpus) {
  const std::uint64_t corpus_tokens = corpus.token_count();
  if (corpus_tokens == 0) throw TrainingError("training corpus is empty (after removing OOV tokens)");

  TrainingReport report;
  const double lr0 = config_.resolved_initial_lr();
  const double lr_min = config_.resolved_min_lr();
  const std::uint64_t planned = corpus_tokens * static_cast<std::uint64_t>(config_.epochs);

  std::vector<double> keep;
  if (config_.subsample > 0) {
    keep.resize(vocab_->size());
    const double total = static_cast<double>(vocab_->total_count());
    for (std::size_t i = 0; i < keep.size(); ++i)
      keep[i] = keep_probability(static_cast<double>(vocab_->count(static_cast<TokenId>(i))) / total,
                                 config_.subsample);
  }

  const int workers = std::min<int>(config_.workers, static_cast<int>(corpus.sentences.size()));
  std::vector<std::mt19937_64> rngs;
  for (int w = 0; w < workers; ++w) rngs.emplace_back(worker_seed(config_.seed, w));

  std::atomic<std::uint64_t> progress{0};
  const WindowOptions window_options{config_.window, config_.dynamic_window};
  const auto n_neg = static_cast<std::size_t>(config_.negatives);

  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    std::mutex totals_mutex;
    double epoch_loss = 0;
    std::uint64_t epoch_predictions = 0;

    auto work = [&](int w) {
      auto& rng = rngs[static_cast<std::size_t>(w)];
      const std::size_t begin = corpus.sentences.size() * static_cast<std::size_t>(w) / workers;
      const std::size_t end = corpus.sentences.size() * static_cast<std::size_t>(w + 1) / workers;
      std::vector<TokenId> kept;
      std::vector<TokenId> negatives;
      std::vector<double> scratch;
      double loss = 0;
      std::uint64_t predictions = 0;
      for (std::size_t s = begin; s < end; ++s) {
        const auto& sentence = corpus.sentences[s];
        const auto done = progress.fetch_add(sentence.size(), std::memory_order_relaxed);
        const double lr = std::max(lr_min, lr0 - (lr0 - lr_min) * static_cast<double>(done) /
                                                     static_cast<double>(planned));
        std::span<const TokenId> tokens = sentence;
        if (!keep.empty()) {
          kept.clear();
          for (TokenId id : sentence)
            if (keep[id] >= 1.0 || uniform01(rng) < keep[id]) kept.push_back(id);
          tokens = kept;
        }
        for_each_window(tokens, window_options, rng, [&](const Window& win) {
          const auto preds = prediction_count(config_.model, win);
          if (preds == 0) return;
          negatives.resize(preds * n_neg);
          for (auto& id : negatives) id = table_->sample(rng());
          loss += train_window(params_, win, negatives, lr, scratch);
          predictions += preds;
        });
      }
      std::lock_guard lock(totals_mutex);
      epoch_loss += loss;
      epoch_predictions += predictions;
    };

    if (workers == 1) {
      work(0);
    } else {
      // Asynchronous lock-free updates; only workers == 1 is reproducible.
      std::vector<std::jthread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    }

    const double mean = epoch_predictions ? epoch_loss / static_cast<double>(epoch_predictions) : 0.0;
    if (!std::isfinite(mean) || !all_finite(params_.input.data()) || !params_.output.all_finite())
      throw DivergenceError("non-finite parameters after epoch " + std::to_string(epoch + 1) + " of " +
                            std::string(to_string(config_.model)) + " training (lr=" +
                            std::to_string(lr0) + ")");
    report.epoch_loss.push_back(mean);
    report.predictions += epoch_predictions;
    spdlog::debug("{} epoch {}/{}: mean loss {:.6f} over {} predictions", to_string(config_.model),
                  epoch + 1, config_.epochs, mean, epoch_predictions);
  }
  report.tokens_processed = progress.load();
  return report;
}

EmbeddingMatrix EmbeddingTrainer::embeddings() const {
  std::vector<float> values(params_.input.data().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<float>(params_.input.data()[i]);
  EmbeddingMetadata meta{std::string(to_string(config_.model)), hex_digest(fnv1a64(config_.describe()))};
  return EmbeddingMatrix(vocab_->tokens(), config_.dim, std::move(values), std::move(meta));
}

EmbeddingMatrix train(const TrainingConfig& config, const EncodedCorpus& corpus, const Vocabulary& vocab,
                      const NegativeTable& table, TrainingReport* report) {
  EmbeddingTrainer trainer(config, vocab, table);
  if (corpus.empty()) throw TrainingError("training corpus is empty (after removing OOV tokens)");
  auto r = trainer.run(corpus);
  if (report) *report = std::move(r);
  return trainer.embeddings();
}

}  // namespace fnt
