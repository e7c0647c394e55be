#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fnt/embedding.hpp"
#include "fnt/sgns.hpp"
#include "fnt/vocab.hpp"
#include "fnt/windows.hpp"

namespace fnt {

struct TrainingConfig {
  ModelKind model = ModelKind::Skip;
  std::size_t dim = 200;
  int window = 3;
  int negatives = 10;
  int epochs = 5;
  // Unset means the model default: 0.025 for SKIP/SSKIP, 0.05 for CBOW/CWIN.
  std::optional<double> initial_lr;
  // Unset means initial_lr * 1e-4.
  std::optional<double> min_lr;
  std::uint64_t seed = 1;
  int workers = 1;
  bool dynamic_window = false;
  // Frequent-token subsampling threshold; 0 disables.
  double subsample = 0.0;

  double resolved_initial_lr() const;
  double resolved_min_lr() const;
  // Throws ConfigError on inconsistent settings.
  void validate() const;
  // Stable textual description, hashed into EmbeddingMetadata::config_digest.
  std::string describe() const;
};

struct TrainingReport {
  // Mean loss per SGNS prediction, one entry per epoch.
  std::vector<double> epoch_loss;
  std::uint64_t predictions = 0;
  std::uint64_t tokens_processed = 0;
};

// Owns the full parameter set so callers can inspect the output side.
class EmbeddingTrainer {
 public:
  EmbeddingTrainer(TrainingConfig config, const Vocabulary& vocab, const NegativeTable& table);

  // Runs all configured epochs over the corpus. Throws TrainingError for an
  // empty corpus and DivergenceError when parameters become non-finite.
  TrainingReport run(const EncodedCorpus& corpus);

  const ModelParameters& parameters() const noexcept { return params_; }
  ModelParameters& parameters() noexcept { return params_; }

  // Input vectors as a float matrix aligned with the vocabulary.
  EmbeddingMatrix embeddings() const;

 private:
  TrainingConfig config_;
  const Vocabulary* vocab_;
  const NegativeTable* table_;
  ModelParameters params_;
};

EmbeddingMatrix train(const TrainingConfig& config, const EncodedCorpus& corpus,
                      const Vocabulary& vocab, const NegativeTable& table,
                      TrainingReport* report = nullptr);

}  // namespace fnt
