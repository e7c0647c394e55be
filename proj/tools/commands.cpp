#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fnt/error.hpp"
#include "fnt/evaluate.hpp"
#include "fnt/report.hpp"
#include "fnt/windows.hpp"

namespace fnt::cli {

namespace {

void require_file(const std::filesystem::path& p, std::string_view what) {
  if (!std::filesystem::is_regular_file(p))
    throw IoError(std::string(what) + " not found: " + p.string());
}

Vocabulary load_or_build_vocab(const std::optional<std::filesystem::path>& vocab_path,
                               const std::filesystem::path& corpus, Count min_count, bool lowercase) {
  if (vocab_path) {
    require_file(*vocab_path, "vocabulary");
    return read_vocabulary(*vocab_path, lowercase);
  }
  return build_vocabulary(corpus, {min_count, lowercase});
}

struct SplitData {
  LabeledData data;
  std::vector<std::size_t> rows;  // example index for each data row
  std::size_t excluded = 0;
};

SplitData collect(const std::vector<NameTypingExample>& examples, const EmbeddingMatrix& emb,
                  const TypeSystem& types) {
  SplitData out{LabeledData(emb.dim(), types.size()), {}, 0};
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto v = emb.lookup(examples[i].name);
    if (!v) {
      ++out.excluded;
      continue;
    }
    out.data.add(*v, examples[i].types);
    out.rows.push_back(i);
  }
  return out;
}

std::pair<std::string, std::filesystem::path> split_named(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq != std::string::npos && eq > 0) return {spec.substr(0, eq), spec.substr(eq + 1)};
  std::filesystem::path p(spec);
  return {p.stem().string(), p};
}

void configure_logging(const GlobalOptions& g) {
  static auto logger = spdlog::stderr_color_mt("fnt");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  if (g.quiet)
    spdlog::set_level(spdlog::level::warn);
  else if (g.verbosity >= 1)
    spdlog::set_level(spdlog::level::debug);
  else
    spdlog::set_level(spdlog::level::info);
}

}  // namespace

SplitFractions parse_fractions(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse split fraction '" + item + "'");
    }
  }
  if (parts.size() != 3) throw ConfigError("expected three split fractions train,dev,test");
  SplitFractions f{parts[0], parts[1], parts[2]};
  if (f.train < 0 || f.dev < 0 || f.test < 0 || std::abs(f.train + f.dev + f.test - 1.0) > 1e-9)
    throw ConfigError("split fractions must be non-negative and sum to 1, got " + text);
  return f;
}

int cmd_build_vocab(const BuildVocabArgs& args, const GlobalOptions&) {
  require_file(args.corpus, "corpus");
  auto vocab = build_vocabulary(args.corpus, {args.min_count, !args.no_lowercase});
  write_vocabulary(vocab, args.output);
  const auto& st = vocab.stats();
  spdlog::info("vocabulary: {} types kept from {} tokens on {} lines ({} tokens below min_count {})",
               vocab.size(), st.total_tokens, st.total_lines, st.oov_tokens_dropped, args.min_count);
  return 0;
}

int cmd_train_embeddings(const TrainEmbeddingsArgs& args, const GlobalOptions& global) {
  require_file(args.corpus, "corpus");
  TrainingConfig config;
  config.model = parse_model_kind(args.model);
  config.dim = args.dim;
  config.window = args.window;
  config.negatives = args.negatives;
  config.epochs = args.epochs;
  config.initial_lr = args.lr;
  config.min_lr = args.min_lr;
  config.seed = global.seed;
  config.workers = global.workers;
  config.dynamic_window = args.dynamic_window;
  config.subsample = args.subsample;
  config.validate();
  const auto format = parse_embedding_format(args.format);

  auto vocab = load_or_build_vocab(args.vocab, args.corpus, args.min_count, !args.no_lowercase);
  if (args.vocab_out) write_vocabulary(vocab, *args.vocab_out);
  auto table = build_negative_table(vocab, std::max(args.table_size, vocab.size()), args.table_power);
  auto corpus = encode_corpus(args.corpus, vocab);
  spdlog::info("training {} (dim {}, window {}, negatives {}, epochs {}) on {} tokens, vocabulary {}",
               to_string(config.model), config.dim, config.window, config.negatives, config.epochs,
               corpus.token_count(), vocab.size());
  TrainingReport report;
  auto matrix = train(config, corpus, vocab, table, &report);
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
    spdlog::info("epoch {}: mean loss {:.5f}", e + 1, report.epoch_loss[e]);
  write_embeddings(matrix, args.output, format);
  return 0;
}

int cmd_build_dataset(const BuildDatasetArgs& args, const GlobalOptions& global) {
  NameTypes name_types;
  if (args.prebuilt) {
    require_file(*args.prebuilt, "pre-built dataset");
    name_types = load_name_types(*args.prebuilt);
  } else {
    if (!args.entity_types || !args.name_entities || !args.type_mapping)
      throw ConfigError("either --prebuilt or all of --entity-types, --name-entities and --type-mapping are required");
    require_file(*args.entity_types, "entity-types file");
    require_file(*args.name_entities, "name-entities file");
    require_file(*args.type_mapping, "type-mapping file");
    DeriveStats ds;
    name_types = derive_name_types(load_name_entities(*args.name_entities), load_entity_types(*args.entity_types),
                                   load_type_mapping(*args.type_mapping), &ds);
    spdlog::info("derived types for {} names ({} unknown entities, {} unmapped raw types, {} untyped names)",
                 name_types.size(), ds.unknown_entities, ds.unmapped_raw_types, ds.untyped_names);
  }

  Vocabulary vocab;
  if (args.vocab || args.corpus) {
    if (args.corpus) require_file(*args.corpus, "corpus");
    vocab = load_or_build_vocab(args.vocab, args.corpus.value_or(""), 1, !args.no_lowercase);
  } else if (args.min_freq > 0) {
    throw ConfigError("frequency filtering needs --vocab or --corpus (or --min-freq 0)");
  }

  TypeSystem types;
  if (args.types_file) {
    require_file(*args.types_file, "types file");
    std::ifstream in(*args.types_file);
    std::vector<std::string> names;
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) names.push_back(line);
    types = TypeSystem(std::move(names));
  } else if (args.default_types) {
    types = TypeSystem::default_inventory();
  } else {
    NameTypes single;
    for (const auto& [name, t] : name_types)
      if (name.find_first_of(" \t") == std::string::npos) single.emplace(name, t);
    types = select_top_k_types(single, args.top_k);
  }

  FilterStats fs;
  auto filtered = filter_names(name_types, vocab, types, {args.min_freq}, &fs);
  spdlog::info("{} names pass the filters ({} multi-word, {} below frequency {}, {} without a kept type)",
               filtered.size(), fs.multi_word, fs.below_frequency, args.min_freq, fs.no_known_type);

  auto dataset = sample_and_split(filtered, types, {args.sample_size, args.fractions, global.seed});
  write_dataset(dataset, args.output_dir);
  write_dataset_stats(dataset, args.output_dir / "stats.tsv");
  auto stats = dataset_stats(dataset);
  for (std::size_t s = 0; s < 3; ++s)
    spdlog::info("{}: {} names, avg {:.2f} types per name", to_string(kAllSplits[s]), stats[s].names,
                 stats[s].avg_types);
  return 0;
}

int cmd_evaluate(const EvaluateArgs& args, const GlobalOptions& global) {
  if (!std::filesystem::is_directory(args.dataset_dir))
    throw IoError("dataset directory not found: " + args.dataset_dir.string());
  const auto dataset = read_dataset(args.dataset_dir);
  const auto format = parse_embedding_format(args.format);

  std::vector<ClassifierKind> kinds;
  if (args.classifier == "both")
    kinds = {ClassifierKind::LogisticRegression, ClassifierKind::Mlp};
  else
    kinds = {parse_classifier_kind(args.classifier)};

  TokenFilter names;
  for (auto s : kAllSplits)
    for (const auto& ex : dataset.split(s)) names.insert(ex.name);

  std::vector<ReportRow> rows;
  for (const auto& spec : args.embeddings) {
    auto [model_name, path] = split_named(spec);
    require_file(path, "embedding file");
    auto emb = read_embeddings(path, format, names);
    if (emb.empty()) throw ConfigError("no dataset name has an embedding in " + path.string());

    auto train = collect(dataset.train, emb, dataset.types);
    auto dev = collect(dataset.dev, emb, dataset.types);
    auto test = collect(dataset.test, emb, dataset.types);
    spdlog::info("{}: {} train / {} dev / {} test names with embeddings ({} / {} / {} excluded)", model_name,
                 train.data.size(), dev.data.size(), test.data.size(), train.excluded, dev.excluded,
                 test.excluded);

    for (auto kind : kinds) {
      ClassifierConfig cfg;
      cfg.kind = kind;
      cfg.epochs = kind == ClassifierKind::LogisticRegression ? args.lr_epochs : args.mlp_epochs;
      cfg.learning_rate = kind == ClassifierKind::LogisticRegression ? args.lr_rate : args.mlp_rate;
      cfg.l2 = args.l2;
      cfg.hidden = args.hidden;
      cfg.batch_size = args.batch_size;
      cfg.momentum = args.momentum;
      cfg.threshold = args.threshold;
      cfg.patience = args.patience;
      cfg.per_type_mlp = args.per_type_mlp;
      cfg.standardize = args.standardize;
      cfg.seed = global.seed;
      cfg.workers = global.workers;

      TrainingHistory history;
      auto model = train_classifier(train.data, cfg, &dev.data, dataset.types, &history);
      if (args.save_models) {
        std::filesystem::create_directories(*args.save_models);
        save_classifier(model, *args.save_models /
                                   (model_name + "." + to_lower_ascii(to_string(kind)) + ".model"));
      }

      std::vector<TypeSet> predictions(dataset.test.size(), dataset.types.make_set());
      std::vector<TypeSet> gold;
      gold.reserve(dataset.test.size());
      for (const auto& ex : dataset.test) gold.push_back(ex.types);
      for (std::size_t r = 0; r < test.rows.size(); ++r) predictions[test.rows[r]] = model.predict(test.data.row(r));

      auto report = evaluate_predictions(predictions, gold, test.excluded, args.min_group);
      spdlog::info("{} {}: acc {} micro-F1 {} (best epoch {})", model_name, to_string(kind),
                   format_percent(report.acc), format_percent(report.micro_f1), history.best_epoch);
      rows.push_back({model_name, std::string(to_string(kind)), std::move(report)});
    }
  }

  emit_report(rows, args.output, ReportFormat::Tsv);
  auto results = args.results.value_or(args.output.parent_path() / (args.output.stem().string() + ".json"));
  save_results(rows, results);
  if (!spdlog::should_log(spdlog::level::info)) return 0;
  std::cerr << render_report(rows, ReportFormat::HumanTable);
  return 0;
}

int cmd_report(const ReportArgs& args, const GlobalOptions&) {
  std::vector<ReportRow> rows;
  for (const auto& in : args.inputs) {
    require_file(in, "results file");
    auto part = load_results(in);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  emit_report(rows, args.output, parse_report_format(args.format));
  return 0;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Fine-grained name typing toolkit: embeddings, datasets, classifiers, evaluation", "fnt"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value configuration file; command-line flags take precedence");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for every stochastic stage")->capture_default_str();
  app.add_option("--workers", global.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("-v,--verbose", global.verbosity, "More logging");
  app.add_flag("-q,--quiet", global.quiet, "Only warnings and errors");

  BuildVocabArgs bv;
  auto* build_vocab = app.add_subcommand("build-vocab", "Count a tokenized corpus and write the vocabulary TSV");
  build_vocab->add_option("--corpus", bv.corpus, "Whitespace-tokenized corpus, one document per line")->required();
  build_vocab->add_option("--output", bv.output, "Vocabulary TSV (token<TAB>count)")->required();
  build_vocab->add_option("--min-count", bv.min_count, "Minimum corpus frequency")->capture_default_str();
  build_vocab->add_flag("--no-lowercase", bv.no_lowercase, "Keep original case");

  TrainEmbeddingsArgs te;
  auto* train_emb = app.add_subcommand("train-embeddings", "Train SKIP/CBOW/SSKIP/CWIN embeddings");
  train_emb->add_option("--corpus", te.corpus, "Training corpus")->required();
  train_emb->add_option("--vocab", te.vocab, "Existing vocabulary TSV (otherwise built from the corpus)");
  train_emb->add_option("--vocab-out", te.vocab_out, "Also write the vocabulary used");
  train_emb->add_option("--min-count", te.min_count, "Minimum corpus frequency")->capture_default_str();
  train_emb->add_flag("--no-lowercase", te.no_lowercase, "Keep original case");
  train_emb->add_option("--model", te.model, "skip | cbow | sskip | cwin")
      ->required()
      ->check(CLI::IsMember({"skip", "cbow", "sskip", "cwin"}, CLI::ignore_case));
  train_emb->add_option("--dim", te.dim, "Embedding width")->check(CLI::PositiveNumber)->capture_default_str();
  train_emb->add_option("--window", te.window, "Context window")->check(CLI::PositiveNumber)->capture_default_str();
  train_emb->add_option("--negatives", te.negatives, "Negative samples per prediction")->capture_default_str();
  train_emb->add_option("--epochs", te.epochs, "Passes over the corpus")->capture_default_str();
  train_emb->add_option("--lr", te.lr, "Initial learning rate (default 0.025 skip/sskip, 0.05 cbow/cwin)");
  train_emb->add_option("--min-lr", te.min_lr, "Final learning rate (default lr * 1e-4)");
  train_emb->add_option("--subsample", te.subsample, "Subsampling threshold, 0 = off")->capture_default_str();
  train_emb->add_flag("--dynamic-window", te.dynamic_window, "Sample the window per center from [1, window]");
  train_emb->add_option("--table-size", te.table_size, "Negative sampling table size")->capture_default_str();
  train_emb->add_option("--table-power", te.table_power, "Unigram power")->capture_default_str();
  train_emb->add_option("--output", te.output, "Embedding file to write")->required();
  train_emb->add_option("--format", te.format, "w2v-text | w2v-bin | glove")
      ->check(CLI::IsMember({"w2v-text", "w2v-bin", "glove"}))
      ->capture_default_str();

  BuildDatasetArgs bd;
  std::string fractions = "0.5,0.2,0.3";
  auto* build_ds = app.add_subcommand("build-dataset", "Build train/dev/test name-typing splits");
  build_ds->add_option("--entity-types", bd.entity_types, "entity<TAB>raw types TSV");
  build_ds->add_option("--name-entities", bd.name_entities, "name<TAB>entities TSV");
  build_ds->add_option("--type-mapping", bd.type_mapping, "raw_type<TAB>coarse_type TSV");
  build_ds->add_option("--prebuilt", bd.prebuilt, "Pre-built name<TAB>types TSV");
  build_ds->add_option("--vocab", bd.vocab, "Vocabulary TSV for the frequency filter");
  build_ds->add_option("--corpus", bd.corpus, "Corpus for the frequency filter (if no --vocab)");
  build_ds->add_flag("--no-lowercase", bd.no_lowercase, "Keep original case when counting the corpus");
  build_ds->add_option("--min-freq", bd.min_freq, "Minimum corpus frequency of a name")->capture_default_str();
  build_ds->add_option("--top-k", bd.top_k, "Keep the k most frequent types")->capture_default_str();
  build_ds->add_option("--types", bd.types_file, "Explicit type inventory, one per line");
  build_ds->add_flag("--default-types", bd.default_types, "Use the built-in 50-type inventory");
  build_ds->add_option("--sample-size", bd.sample_size, "Names to sample")->capture_default_str();
  build_ds->add_option("--fractions", fractions, "train,dev,test fractions")
      ->check([](const std::string& s) -> std::string {
        try {
          parse_fractions(s);
          return {};
        } catch (const ConfigError& e) {
          return e.what();
        }
      })
      ->capture_default_str();
  build_ds->add_option("--output-dir", bd.output_dir, "Directory for the split files")->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Train classifiers on name embeddings and score the test split");
  evaluate->add_option("--embeddings", ev.embeddings, "Embedding file(s), optionally name=path")->required();
  evaluate->add_option("--format", ev.format, "w2v-text | w2v-bin | glove")
      ->check(CLI::IsMember({"w2v-text", "w2v-bin", "glove"}))
      ->capture_default_str();
  evaluate->add_option("--dataset-dir", ev.dataset_dir, "Directory written by build-dataset")->required();
  evaluate->add_option("--classifier", ev.classifier, "lr | mlp | both")
      ->check(CLI::IsMember({"lr", "mlp", "both"}, CLI::ignore_case))
      ->capture_default_str();
  evaluate->add_option("--output", ev.output, "Report TSV")->required();
  evaluate->add_option("--results", ev.results, "Full JSON results (default <output>.json)");
  evaluate->add_option("--save-models", ev.save_models, "Directory for trained classifiers");
  evaluate->add_option("--min-group", ev.min_group, "Breakdown keeps groups larger than this")->capture_default_str();
  evaluate->add_option("--lr-epochs", ev.lr_epochs, "LR epochs (default 20)");
  evaluate->add_option("--lr-rate", ev.lr_rate, "LR learning rate (default 0.01)");
  evaluate->add_option("--mlp-epochs", ev.mlp_epochs, "MLP epochs (default 50)");
  evaluate->add_option("--mlp-rate", ev.mlp_rate, "MLP learning rate (default 0.01)");
  evaluate->add_option("--l2", ev.l2, "L2 strength")->capture_default_str();
  evaluate->add_option("--hidden", ev.hidden, "MLP hidden width")->capture_default_str();
  evaluate->add_option("--batch-size", ev.batch_size, "MLP batch size")->capture_default_str();
  evaluate->add_option("--momentum", ev.momentum, "MLP momentum")->capture_default_str();
  evaluate->add_option("--threshold", ev.threshold, "Decision threshold")->capture_default_str();
  evaluate->add_option("--patience", ev.patience, "Early-stopping patience on dev micro-F1")->capture_default_str();
  evaluate->add_flag("--per-type-mlp", ev.per_type_mlp, "One MLP per type instead of a shared network");
  evaluate->add_flag("--standardize", ev.standardize, "Standardize embedding dimensions on train");

  ReportArgs rp;
  auto* report = app.add_subcommand("report", "Render saved evaluation results");
  report->add_option("--input", rp.inputs, "Results JSON written by evaluate")->required();
  report->add_option("--output", rp.output, "Output file")->required();
  report->add_option("--format", rp.format, "tsv | table")
      ->check(CLI::IsMember({"tsv", "table"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  configure_logging(global);
  try {
    if (*build_vocab) return cmd_build_vocab(bv, global);
    if (*train_emb) {
      te.model = to_lower_ascii(te.model);
      return cmd_train_embeddings(te, global);
    }
    if (*build_ds) {
      bd.fractions = parse_fractions(fractions);
      return cmd_build_dataset(bd, global);
    }
    if (*evaluate) {
      ev.classifier = to_lower_ascii(ev.classifier);
      return cmd_evaluate(ev, global);
    }
    if (*report) return cmd_report(rp, global);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 1;
  }
  return 1;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"fnt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace fnt::cli
