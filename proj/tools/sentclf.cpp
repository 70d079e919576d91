// Copyright 2026 The sentclf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, eval, predict, bench, synth.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sentclf/sentclf.hpp"

namespace {

using namespace sentclf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDiverged = 3;

// Flags that map one-to-one onto RunConfig keys. Only flags given on the
// command line are applied, after the --config file.
const std::vector<std::pair<std::string, std::string>> kRunFlags = {
    {"name", "run name used by bench and in the config echo"},
    {"arch", "fnn, cnn, rnn or lstm"},
    {"encoding", "glove, word2vec, onehot or counts"},
    {"embeddings", "pre-trained vectors (text for glove, binary for word2vec)"},
    {"dim", "hash dimension for onehot/counts"},
    {"window", "CNN window width"},
    {"conv-out", "CNN filter count"},
    {"hidden", "hidden layer size"},
    {"dropout", "dropout probability"},
    {"optimizer", "auto, adagrad, sgd or lbfgs"},
    {"lr", "learning rate"},
    {"decay", "learning-rate decay"},
    {"batch", "minibatch size"},
    {"epochs", "passes over the training data (L-BFGS iterations for lbfgs)"},
    {"max-len", "pad or truncate sentences to this many tokens"},
    {"seed", "run seed"},
    {"train", "training file"},
    {"test", "test file (tsv: omit to split the training file)"},
    {"format", "uiuc or tsv"},
    {"split", "train fraction when splitting a single tsv file"},
    {"min-count", "minimum training frequency for count-vector tokens"},
    {"oov", "zero or random: vectors for tokens missing from the embeddings"},
    {"lbfgs-memory", "L-BFGS history size"},
    {"out", "output directory"},
};

struct RunFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool fine_tune = false;
  bool segmented = false;
  CLI::App* app = nullptr;
};

void add_run_flags(CLI::App* app, RunFlags& flags) {
  flags.app = app;
  app->add_option("--config", flags.config_path, "key=value file; flags override it");
  for (const auto& [key, help] : kRunFlags) {
    app->add_option("--" + key, flags.values[key], help);
  }
  app->add_flag("--fine-tune", flags.fine_tune, "update embedding vectors during training");
  app->add_flag("--segmented", flags.segmented, "tsv sentences are '|'-separated words");
}

RunConfig resolve(const RunFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) apply_config_text(cfg, read_text_file(flags.config_path));
  for (const auto& [key, help] : kRunFlags) {
    if (flags.app->count("--" + key) > 0) cfg.set(key, flags.values.at(key));
  }
  if (flags.app->count("--fine-tune") > 0) cfg.fine_tune = flags.fine_tune;
  if (flags.app->count("--segmented") > 0) cfg.segmented = flags.segmented;
  if (cfg.out.empty()) cfg.out = (std::filesystem::path("runs") / cfg.name).string();
  return cfg;
}

TrainResult run_one(const RunConfig& cfg, bool verbose) {
  cfg.validate();
  RunData data = load_run_data(cfg);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
  EpochCallback progress;
  if (verbose) {
    progress = [](const CurveRecord& r) {
      std::fprintf(stderr, "iteration %d  loss %.6f  test accuracy %.4f  %.1fs\n", r.iteration,
                   r.train_loss, r.test_accuracy, r.seconds);
    };
  }
  TrainResult result = train_run(cfg, data.train, data.test, progress);
  write_run_outputs(cfg, result);
  return result;
}

int cmd_train(const RunFlags& flags, bool quiet) {
  RunConfig cfg = resolve(flags);
  TrainResult result = run_one(cfg, !quiet);
  const auto& records = result.curve.records();
  const double final_accuracy = records.empty() ? 0.0 : records.back().test_accuracy;
  std::printf("best_accuracy=%.4f best_iteration=%d final_accuracy=%.4f out=%s\n",
              result.curve.best_accuracy(), result.curve.best_iteration(), final_accuracy,
              cfg.out.c_str());
  return kExitOk;
}

Dataset read_for_model(const TrainedModel& model, const std::string& path,
                       const std::string& format) {
  if (format == "uiuc") return relabel(load_uiuc_file(path), model.labels);
  if (format == "tsv") return relabel(load_tsv(path, model.segmented), model.labels);
  throw ConfigError("format must be uiuc or tsv");
}

int cmd_eval(const std::string& checkpoint, const std::string& test, const std::string& format) {
  TrainedModel model = load_model(checkpoint);
  const double acc = evaluate(model, read_for_model(model, test, format));
  std::printf("accuracy=%.4f\n", acc);
  return kExitOk;
}

// Blank input lines produce blank output lines so output stays aligned.
int cmd_predict(const std::string& checkpoint) {
  TrainedModel model = load_model(checkpoint);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    TokenSeq tokens;
    try {
      tokens = model.segmented ? tokenize_segmented(line) : tokenize(line);
    } catch (const EmptyInputError&) {
      std::cout << "\n";
      continue;
    }
    std::cout << model.labels[predict(model.params, model.encoder(tokens))] << "\n";
  }
  return kExitOk;
}

int cmd_bench(const std::string& grid_path, const std::string& out_root, bool quiet) {
  RunConfig base;
  std::vector<RunConfig> runs = parse_grid_text(read_text_file(grid_path), base);
  std::vector<std::pair<std::string, double>> rows;
  for (RunConfig& cfg : runs) {
    if (cfg.out.empty()) cfg.out = (std::filesystem::path(out_root) / cfg.name).string();
    if (!quiet) std::cerr << "== " << cfg.name << "\n";
    TrainResult result = run_one(cfg, !quiet);
    rows.emplace_back(cfg.name, result.curve.best_accuracy());
  }
  std::cout << compare_table(rows);
  return kExitOk;
}

int cmd_synth(const SyntheticOptions& opt, std::uint64_t seed, const std::string& out,
              const std::string& vectors, std::size_t dim) {
  Dataset data = make_synthetic_corpus(opt, seed);
  write_tsv(out, data);
  if (!vectors.empty()) write_text_vectors(vectors, make_synthetic_embeddings(data, dim, seed));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural sentence classification: FNN, CNN, RNN and LSTM models"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "no per-iteration progress on stderr");

  RunFlags train_flags;
  auto* train = app.add_subcommand("train", "train one model and write checkpoint, curve, config");
  add_run_flags(train, train_flags);

  std::string checkpoint, test_path, format = "uiuc";
  auto* eval = app.add_subcommand("eval", "accuracy of a checkpoint on a labelled file");
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--test", test_path)->required();
  eval->add_option("--format", format, "uiuc or tsv");

  auto* pred = app.add_subcommand("predict", "label each stdin line");
  pred->add_option("--checkpoint", checkpoint)->required();

  std::string grid, bench_out = "runs";
  auto* bench = app.add_subcommand("bench", "train every run of a grid file, print a table");
  bench->add_option("grid", grid, "grid file")->required();
  bench->add_option("--out", bench_out, "parent directory for runs without out=");

  SyntheticOptions synth_opt;
  std::uint64_t synth_seed = 1;
  std::string synth_out, synth_vectors;
  std::size_t synth_dim = 50;
  auto* synth = app.add_subcommand("synth", "write the seeded synthetic corpus as tsv");
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--examples", synth_opt.examples);
  synth->add_option("--classes", synth_opt.classes);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--vectors", synth_vectors, "also write random text vectors here");
  synth->add_option("--vector-dim", synth_dim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_flags, quiet);
    if (*eval) return cmd_eval(checkpoint, test_path, format);
    if (*pred) return cmd_predict(checkpoint);
    if (*bench) return cmd_bench(grid, bench_out, quiet);
    if (*synth) return cmd_synth(synth_opt, synth_seed, synth_out, synth_vectors, synth_dim);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergedError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
