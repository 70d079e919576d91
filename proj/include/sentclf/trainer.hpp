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

#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "sentclf/checkpoint.hpp"
#include "sentclf/config.hpp"
#include "sentclf/curve.hpp"
#include "sentclf/dataset.hpp"
#include "sentclf/embeddings.hpp"
#include "sentclf/errors.hpp"
#include "sentclf/inputs.hpp"
#include "sentclf/model.hpp"
#include "sentclf/optim.hpp"
#include "sentclf/text.hpp"

namespace sentclf {

/// Row indices into an Encoder's embedding rows (0 is the zero padding row).
struct RowIds {
  std::vector<std::size_t> ids;
};

using EncodedExample = std::variant<SparseVector, OneHotRows, RowIds>;

/// Maps token sequences to model inputs for one run: hashed count vectors
/// (FNN), hashed one-hot rows, or embedding rows (sequence models).
///
/// Embedding encodings copy the vectors of every token seen while building
/// into a compact row table; this table is what fine-tuning updates.
class Encoder {
 public:
  static Encoder build(const RunConfig& cfg, const std::vector<const Dataset*>& corpora) {
    Encoder enc;
    enc.encoding_ = cfg.encoding;
    enc.dim_ = cfg.dim;
    enc.max_len_ = cfg.max_len;
    enc.embeddings_path_ = cfg.embeddings;
    enc.oov_ = cfg.oov;
    enc.seed_ = cfg.seed;
    if (cfg.encoding == Encoding::kCounts) {
      if (corpora.empty()) throw DataError("count vectors need a training corpus");
      std::vector<TokenSeq> seqs;
      for (const auto& ex : corpora.front()->examples) seqs.push_back(ex.tokens);
      enc.vocab_ = Vocabulary::build(seqs, cfg.min_count);
    } else if (uses_embeddings(cfg.encoding)) {
      enc.load_table();
      enc.rows_ = Tensor({1, enc.table_->dim()});
      for (const Dataset* data : corpora) {
        for (const auto& ex : data->examples) {
          for (const auto& tok : ex.tokens.tokens) enc.intern(tok);
        }
      }
    }
    return enc;
  }

  Encoding encoding() const { return encoding_; }
  std::size_t max_len() const { return max_len_; }

  std::size_t input_dim() const {
    if (uses_embeddings(encoding_)) return rows_.extent(1);
    return dim_;
  }

  EncodedExample encode(const TokenSeq& tokens) const {
    switch (encoding_) {
      case Encoding::kCounts: {
        TokenSeq kept;
        for (const auto& tok : tokens.tokens) {
          if (vocab_.index_of(tok) >= 2) kept.tokens.push_back(tok);
        }
        kept.length = kept.tokens.size();
        return SparseVector::from_dense(count_vector(kept, dim_));
      }
      case Encoding::kOneHot:
        return OneHotRows::from_tokens(pad_or_truncate(tokens, max_len_), dim_);
      default: {
        RowIds r;
        for (const auto& tok : pad_or_truncate(tokens, max_len_).tokens) {
          r.ids.push_back(row_of(tok));
        }
        return r;
      }
    }
  }

  ModelInput materialize(const EncodedExample& e) const {
    if (auto* s = std::get_if<SparseVector>(&e)) return *s;
    if (auto* o = std::get_if<OneHotRows>(&e)) return SequenceInput(*o);
    const auto& ids = std::get<RowIds>(e).ids;
    const std::size_t d = rows_.extent(1);
    Tensor x({ids.size(), d});
    for (std::size_t t = 0; t < ids.size(); ++t) {
      const std::size_t id = ids[t];
      if (id < rows_.extent(0)) {
        auto src = rows_.row(id);
        std::copy(src.begin(), src.end(), x.row(t).begin());
      } else {
        auto v = table_->resolve(extra_tokens_.at(id - rows_.extent(0)));
        std::copy(v.begin(), v.end(), x.row(t).begin());
      }
    }
    return SequenceInput(std::move(x));
  }

  ModelInput operator()(const TokenSeq& tokens) const { return materialize(encode(tokens)); }

  Tensor& rows() { return rows_; }
  const Tensor& rows() const { return rows_; }

  /// Adds scale * d(loss)/dX back onto the embedding rows used by `e`.
  void scatter_input_grad(const EncodedExample& e, const Tensor& dx, Tensor& row_grads) const {
    const auto& ids = std::get<RowIds>(e).ids;
    for (std::size_t t = 0; t < ids.size(); ++t) {
      if (ids[t] == 0 || ids[t] >= row_grads.extent(0)) continue;
      detail::add_scaled(dx.row(t), 1.0, row_grads.row(ids[t]));
    }
  }

  void save(Checkpoint& ckpt, bool store_rows) const {
    ckpt.meta["encoding"] = std::string(encoding_name(encoding_));
    ckpt.meta["dim"] = std::to_string(dim_);
    ckpt.meta["max_len"] = std::to_string(max_len_);
    ckpt.meta["embeddings"] = embeddings_path_;
    ckpt.meta["oov"] = oov_;
    ckpt.meta["seed"] = std::to_string(seed_);
    if (encoding_ == Encoding::kCounts) ckpt.lists["vocabulary"] = vocab_.kept_tokens();
    if (store_rows && uses_embeddings(encoding_)) {
      ckpt.lists["embedding_tokens"] = row_tokens_;
      ckpt.extra.emplace_back("embedding_rows", rows_);
    }
  }

  static Encoder load(const Checkpoint& ckpt) {
    auto get = [&](const char* key) -> std::string {
      auto it = ckpt.meta.find(key);
      if (it == ckpt.meta.end()) throw DataError(std::string("checkpoint lacks '") + key + "'");
      return it->second;
    };
    Encoder enc;
    enc.encoding_ = parse_encoding(get("encoding"));
    enc.dim_ = std::stoull(get("dim"));
    enc.max_len_ = std::stoull(get("max_len"));
    enc.embeddings_path_ = get("embeddings");
    enc.oov_ = get("oov");
    enc.seed_ = std::stoull(get("seed"));
    if (enc.encoding_ == Encoding::kCounts) {
      auto it = ckpt.lists.find("vocabulary");
      enc.vocab_ = Vocabulary::from_tokens(it == ckpt.lists.end() ? std::vector<std::string>{}
                                                                  : it->second);
    } else if (uses_embeddings(enc.encoding_)) {
      enc.load_table();
      enc.rows_ = Tensor({1, enc.table_->dim()});
      auto tokens = ckpt.lists.find("embedding_tokens");
      if (tokens != ckpt.lists.end()) {
        for (const auto& [name, t] : ckpt.extra) {
          if (name != "embedding_rows") continue;
          if (t.rank() != 2 || t.extent(0) != tokens->second.size() + 1) {
            throw DataError("checkpoint embedding rows do not match their token list");
          }
          enc.rows_ = t;
          enc.row_tokens_ = tokens->second;
          for (std::size_t i = 0; i < enc.row_tokens_.size(); ++i) {
            enc.row_index_.emplace(enc.row_tokens_[i], i + 1);
          }
        }
      }
    }
    return enc;
  }

 private:
  void load_table() {
    EmbeddingTable t = encoding_ == Encoding::kGlove ? load_text_vectors(embeddings_path_)
                                                     : load_binary_vectors(embeddings_path_);
    t.set_policy(oov_ == "random" ? OovPolicy::kRandomFixed : OovPolicy::kZero, seed_);
    table_ = std::make_shared<EmbeddingTable>(std::move(t));
  }

  void intern(const std::string& tok) {
    if (is_padding(tok) || row_index_.contains(tok)) return;
    auto v = table_->resolve(tok);
    Tensor grown({rows_.extent(0) + 1, rows_.extent(1)});
    std::copy(rows_.data().begin(), rows_.data().end(), grown.data().begin());
    std::copy(v.begin(), v.end(), grown.row(rows_.extent(0)).begin());
    row_index_.emplace(tok, rows_.extent(0));
    row_tokens_.push_back(tok);
    rows_ = std::move(grown);
  }

  std::size_t row_of(const std::string& tok) const {
    if (is_padding(tok)) return 0;
    if (auto it = row_index_.find(tok); it != row_index_.end()) return it->second;
    // Unseen at build time: resolved lazily from the full table.
    extra_tokens_.push_back(tok);
    return rows_.extent(0) + extra_tokens_.size() - 1;
  }

  Encoding encoding_ = Encoding::kGlove;
  std::size_t dim_ = 0;
  std::size_t max_len_ = 20;
  std::string embeddings_path_;
  std::string oov_ = "zero";
  std::uint64_t seed_ = 0;
  Vocabulary vocab_;
  std::shared_ptr<EmbeddingTable> table_;
  Tensor rows_;
  std::vector<std::string> row_tokens_;
  std::unordered_map<std::string, std::size_t> row_index_;
  mutable std::vector<std::string> extra_tokens_;
};

/// A trained classifier together with what it needs to read raw text.
struct TrainedModel {
  ModelParams params;
  Encoder encoder;
  std::vector<std::string> labels;
  bool segmented = false;
};

struct TrainResult {
  TrainedModel model;
  LearningCurve curve;
  std::string optimizer_status;
};

inline double evaluate(const ModelParams& params, const std::vector<ModelInput>& inputs,
                       const std::vector<std::size_t>& gold) {
  if (inputs.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (predict(params, inputs[i]) == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(inputs.size());
}

/// Fraction of `test` examples whose predicted label equals the gold label.
inline double evaluate(const TrainedModel& model, const Dataset& test) {
  if (test.labels != model.labels) throw DataError("label catalog of test set does not match the model");
  std::vector<ModelInput> inputs;
  std::vector<std::size_t> gold;
  for (const auto& ex : test.examples) {
    inputs.push_back(model.encoder(ex.tokens));
    gold.push_back(ex.label);
  }
  return evaluate(model.params, inputs, gold);
}

/// Called after every epoch with the record just added.
using EpochCallback = std::function<void(const CurveRecord&)>;

inline ArchSpec arch_spec(const RunConfig& cfg, std::size_t input_dim, std::size_t classes) {
  ArchSpec spec;
  spec.arch = cfg.arch;
  spec.input_dim = input_dim;
  spec.num_classes = classes;
  spec.hidden = {cfg.hidden};
  spec.conv_out = cfg.conv_out;
  spec.window = cfg.window;
  spec.dropout = cfg.arch == Arch::kFnn ? 0.0 : cfg.dropout;
  return spec;
}

/// Trains one configuration. One iteration is one pass over `train` (one
/// L-BFGS iteration for full-batch training); after each, the mean training
/// loss and the test accuracy are recorded. Deterministic given cfg.seed.
inline TrainResult train_run(const RunConfig& cfg, const Dataset& train, const Dataset& test,
                             const EpochCallback& on_epoch = {}) {
  if (train.examples.empty()) throw EmptyInputError("empty training set");
  train.validate();
  if (test.labels != train.labels) throw DataError("train and test label catalogs differ");
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  TrainResult result;
  result.model.labels = train.labels;
  result.model.segmented = cfg.segmented;
  result.model.encoder = Encoder::build(cfg, {&train, &test});
  Encoder& enc = result.model.encoder;

  std::vector<EncodedExample> train_x;
  std::vector<std::size_t> train_y;
  for (const auto& ex : train.examples) {
    train_x.push_back(enc.encode(ex.tokens));
    train_y.push_back(ex.label);
  }
  std::vector<EncodedExample> test_x;
  std::vector<std::size_t> test_y;
  for (const auto& ex : test.examples) {
    test_x.push_back(enc.encode(ex.tokens));
    test_y.push_back(ex.label);
  }
  auto test_accuracy = [&](const ModelParams& params) {
    if (test_x.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_x.size(); ++i) {
      if (predict(params, enc.materialize(test_x[i])) == test_y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_x.size());
  };

  ModelParams& params = result.model.params;
  params = init_params(arch_spec(cfg, enc.input_dim(), train.num_classes()), cfg.seed);
  const std::string optimizer = cfg.resolved_optimizer();
  const double inv_n = 1.0 / static_cast<double>(train_x.size());

  if (optimizer == "lbfgs") {
    if (cfg.arch != Arch::kFnn) throw ConfigError("L-BFGS is only used for the FNN");
    ModelParams grads = zeros_like(params);
    Rng unused(0);
    Objective objective = [&](std::span<const double> x, std::span<double> g) {
      unflatten(x, params);
      zero_fill(grads);
      double loss = 0.0;
      for (std::size_t i = 0; i < train_x.size(); ++i) {
        auto fwd = forward(params, enc.materialize(train_x[i]), false, unused);
        loss += cross_entropy(fwd.probs, train_y[i]);
        accumulate_backward(params, fwd.trace, train_y[i], grads, inv_n);
      }
      auto flat = flatten(grads);
      std::copy(flat.begin(), flat.end(), g.begin());
      return loss * inv_n;
    };
    IterationCallback on_iter = [&](int iter, std::span<const double> x, double f) {
      if (!std::isfinite(f)) throw DivergedError("non-finite training loss", iter);
      unflatten(x, params);
      CurveRecord rec{iter, f, test_accuracy(params), elapsed()};
      result.curve.add(rec);
      if (on_epoch) on_epoch(rec);
      return true;
    };
    LbfgsOptions opt;
    opt.memory = cfg.lbfgs_memory;
    opt.max_iter = cfg.epochs;
    opt.tolerance = 1e-9;
    auto res = lbfgs_minimize(objective, flatten(params), opt, on_iter);
    unflatten(res.x, params);
    if (!std::isfinite(res.value)) throw DivergedError("non-finite training loss", res.iterations);
    result.optimizer_status = to_string(res.status);
    return result;
  }

  // Minibatch training (Adagrad or plain SGD) with per-example gradients
  // averaged over the batch.
  Rng shuffle_rng = Rng::stream(cfg.seed, 1);
  Rng dropout_rng = Rng::stream(cfg.seed, 2);
  AdagradState adagrad;
  adagrad.learning_rate = cfg.lr;
  adagrad.decay = cfg.decay;
  AdagradState row_adagrad = adagrad;
  ModelParams grads = zeros_like(params);
  const bool tune_rows = cfg.fine_tune && uses_embeddings(cfg.encoding);
  Tensor row_grads = tune_rows ? Tensor::zeros_like(enc.rows()) : Tensor();
  std::vector<std::size_t> order(train_x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch);
      const double scale = 1.0 / static_cast<double>(stop - start);
      zero_fill(grads);
      if (tune_rows) row_grads.fill(0.0);
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        ModelInput x = enc.materialize(train_x[i]);
        auto fwd = forward(params, x, true, dropout_rng);
        epoch_loss += cross_entropy(fwd.probs, train_y[i]);
        if (tune_rows) {
          const auto& in = std::get<SequenceInput>(x);
          Tensor dx = Tensor::zeros_like(in.dense());
          accumulate_backward(params, fwd.trace, train_y[i], grads, scale, &dx);
          enc.scatter_input_grad(train_x[i], dx, row_grads);
        } else {
          accumulate_backward(params, fwd.trace, train_y[i], grads, scale);
        }
      }
      if (optimizer == "sgd") {
        sgd_step(params, grads, cfg.lr);
        if (tune_rows) sgd_step(enc.rows(), row_grads, cfg.lr);
      } else {
        adagrad_step(adagrad, params, grads);
        if (tune_rows) adagrad_step(row_adagrad, enc.rows(), row_grads);
      }
    }
    const double mean_loss = epoch_loss * inv_n;
    if (!std::isfinite(mean_loss)) throw DivergedError("non-finite training loss", epoch);
    for (const Tensor* t : tensor_list(params)) {
      for (double v : t->data()) {
        if (!std::isfinite(v)) throw DivergedError("non-finite parameters", epoch);
      }
    }
    CurveRecord rec{epoch, mean_loss, test_accuracy(params), elapsed()};
    result.curve.add(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.optimizer_status = "completed";
  return result;
}

inline Checkpoint make_checkpoint(const TrainedModel& model, bool fine_tuned) {
  Checkpoint ckpt;
  ckpt.params = model.params;
  ckpt.lists["labels"] = model.labels;
  ckpt.meta["segmented"] = model.segmented ? "true" : "false";
  model.encoder.save(ckpt, fine_tuned);
  return ckpt;
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  Checkpoint ckpt = read_checkpoint(path);
  TrainedModel model;
  model.params = ckpt.params;
  auto labels = ckpt.lists.find("labels");
  if (labels == ckpt.lists.end()) throw DataError("checkpoint lacks its label catalog");
  model.labels = labels->second;
  model.segmented = ckpt.meta.contains("segmented") && ckpt.meta.at("segmented") == "true";
  model.encoder = Encoder::load(ckpt);
  return model;
}

struct RunData {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

/// Reads the files named by `cfg`: UIUC train/test, TSV train/test, or one
/// TSV split by cfg.split with cfg.seed.
inline RunData load_run_data(const RunConfig& cfg) {
  RunData data;
  if (cfg.format == "uiuc") {
    auto uiuc = load_uiuc(cfg.train, cfg.test);
    data.train = std::move(uiuc.train);
    data.test = std::move(uiuc.test);
  } else if (cfg.test.empty()) {
    auto parts = split(load_tsv(cfg.train, cfg.segmented), cfg.split, cfg.seed);
    for (const auto& l : parts.labels_missing_from_train) {
      data.warnings.push_back("label '" + l + "' has no training examples after the split");
    }
    data.train = std::move(parts.train);
    data.test = std::move(parts.test);
  } else {
    data.train = load_tsv(cfg.train, cfg.segmented);
    data.test = relabel(load_tsv(cfg.test, cfg.segmented), data.train.labels);
  }
  return data;
}

/// Writes model.ckpt, curve.csv and config.txt under cfg.out.
inline void write_run_outputs(const RunConfig& cfg, const TrainResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out);
  write_checkpoint(fs::path(cfg.out) / "model.ckpt", make_checkpoint(result.model, cfg.fine_tune));
  emit_curve(result.curve, fs::path(cfg.out) / "curve.csv");
  std::ofstream echo(fs::path(cfg.out) / "config.txt", std::ios::binary);
  echo << cfg.to_text();
  if (!echo) throw DataError("cannot write config echo under " + cfg.out);
}

}  // namespace sentclf
