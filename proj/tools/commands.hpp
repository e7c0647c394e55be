#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fnt/classify.hpp"
#include "fnt/dataset.hpp"
#include "fnt/embed_io.hpp"
#include "fnt/train.hpp"

namespace fnt::cli {

struct GlobalOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  int verbosity = 0;
  bool quiet = false;
};

struct BuildVocabArgs {
  std::filesystem::path corpus;
  std::filesystem::path output;
  Count min_count = 100;
  bool no_lowercase = false;
};

struct TrainEmbeddingsArgs {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> vocab;
  std::optional<std::filesystem::path> vocab_out;
  Count min_count = 100;
  bool no_lowercase = false;
  std::string model;
  std::size_t dim = 200;
  int window = 3;
  int negatives = 10;
  int epochs = 5;
  std::optional<double> lr;
  std::optional<double> min_lr;
  double subsample = 0.0;
  bool dynamic_window = false;
  std::size_t table_size = NegativeTable::kDefaultSize;
  double table_power = NegativeTable::kDefaultPower;
  std::filesystem::path output;
  std::string format = "w2v-text";
};

struct BuildDatasetArgs {
  std::optional<std::filesystem::path> entity_types;
  std::optional<std::filesystem::path> name_entities;
  std::optional<std::filesystem::path> type_mapping;
  std::optional<std::filesystem::path> prebuilt;
  std::optional<std::filesystem::path> vocab;
  std::optional<std::filesystem::path> corpus;
  bool no_lowercase = false;
  Count min_freq = 100;
  std::size_t top_k = 50;
  std::optional<std::filesystem::path> types_file;
  bool default_types = false;
  std::size_t sample_size = 100'000;
  SplitFractions fractions;
  std::filesystem::path output_dir;
};

struct EvaluateArgs {
  std::vector<std::string> embeddings;  // "name=path" or "path"
  std::string format = "w2v-text";
  std::filesystem::path dataset_dir;
  std::string classifier = "both";
  std::filesystem::path output;
  std::optional<std::filesystem::path> results;
  std::optional<std::filesystem::path> save_models;
  std::size_t min_group = 100;
  std::optional<int> lr_epochs;
  std::optional<double> lr_rate;
  std::optional<int> mlp_epochs;
  std::optional<double> mlp_rate;
  double l2 = 1e-4;
  std::size_t hidden = 100;
  std::size_t batch_size = 32;
  double momentum = 0.9;
  double threshold = 0.5;
  int patience = 5;
  bool per_type_mlp = false;
  bool standardize = false;
};

struct ReportArgs {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;
  std::string format = "tsv";
};

// Each command returns the process exit status; fnt::Error exceptions
// propagate to run().
int cmd_build_vocab(const BuildVocabArgs& args, const GlobalOptions& global);
int cmd_train_embeddings(const TrainEmbeddingsArgs& args, const GlobalOptions& global);
int cmd_build_dataset(const BuildDatasetArgs& args, const GlobalOptions& global);
int cmd_evaluate(const EvaluateArgs& args, const GlobalOptions& global);
int cmd_report(const ReportArgs& args, const GlobalOptions& global);

// Parses "0.5,0.2,0.3"; throws ConfigError unless three non-negative values
// summing to 1.
SplitFractions parse_fractions(const std::string& text);

// Full command-line entry point: 0 on success, 1 on runtime errors, the
// CLI11 exit code (nonzero) on usage errors.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace fnt::cli
