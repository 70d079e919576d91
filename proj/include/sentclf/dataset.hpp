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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentclf/embeddings.hpp"
#include "sentclf/errors.hpp"
#include "sentclf/tensor.hpp"
#include "sentclf/text.hpp"

namespace sentclf {

struct Example {
  std::size_t label = 0;
  TokenSeq tokens;
};

/// Labelled sentences plus the label catalog they index into.
struct Dataset {
  std::vector<Example> examples;
  std::vector<std::string> labels;
  std::string provenance;

  std::size_t size() const { return examples.size(); }
  std::size_t num_classes() const { return labels.size(); }

  std::size_t label_index(const std::string& name) const {
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) throw DataError("unknown label '" + name + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }

  void validate() const {
    if (labels.size() < 2) throw DataError("a dataset needs at least two labels");
    for (const auto& ex : examples) {
      if (ex.label >= labels.size()) throw DataError("example label index out of range");
    }
  }
};

namespace detail {

class LabelCatalog {
 public:
  std::size_t intern(const std::string& name) {
    auto [it, inserted] = index_.try_emplace(name, labels_.size());
    if (inserted) labels_.push_back(name);
    return it->second;
  }
  std::vector<std::string>& labels() { return labels_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> labels_;
};

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return is_space(static_cast<unsigned char>(c)); });
}

struct RawLine {
  std::string label;
  TokenSeq tokens;
};

// "COARSE:fine question text" -> (label, tokens).
inline std::vector<RawLine> read_uiuc_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<RawLine> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(std::move(line));
    if (blank(line)) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) throw ParseError("label line without question text", lineno);
    std::string label = line.substr(0, space);
    const auto colon = label.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == label.size() ||
        label.find(':', colon + 1) != std::string::npos) {
      throw ParseError("malformed label '" + label + "' (expected COARSE:fine)", lineno);
    }
    try {
      out.push_back({std::move(label), tokenize(std::string_view(line).substr(space + 1))});
    } catch (const EmptyInputError&) {
      throw ParseError("empty question text", lineno);
    }
  }
  if (out.empty()) throw EmptyInputError("empty dataset file " + path.string());
  return out;
}

}  // namespace detail

struct UiucData {
  Dataset train;
  Dataset test;
};

/// Loads the UIUC question-classification files with fine-grained labels.
/// The label catalog comes from the training file.
inline UiucData load_uiuc(const std::filesystem::path& train_path,
                          const std::filesystem::path& test_path) {
  detail::LabelCatalog catalog;
  UiucData data;
  for (auto& raw : detail::read_uiuc_lines(train_path)) {
    data.train.examples.push_back({catalog.intern(raw.label), std::move(raw.tokens)});
  }
  data.train.labels = catalog.labels();
  for (auto& raw : detail::read_uiuc_lines(test_path)) {
    auto it = std::find(data.train.labels.begin(), data.train.labels.end(), raw.label);
    if (it == data.train.labels.end()) {
      throw DataError("test label '" + raw.label + "' does not occur in the training file");
    }
    data.test.examples.push_back(
        {static_cast<std::size_t>(it - data.train.labels.begin()), std::move(raw.tokens)});
  }
  data.test.labels = data.train.labels;
  data.train.provenance = "uiuc:" + train_path.string();
  data.test.provenance = "uiuc:" + test_path.string();
  return data;
}

/// One UIUC-format file on its own; labels are indexed in order of first
/// appearance. Use relabel() to move it onto a model's catalog.
inline Dataset load_uiuc_file(const std::filesystem::path& path) {
  detail::LabelCatalog catalog;
  Dataset data;
  for (auto& raw : detail::read_uiuc_lines(path)) {
    data.examples.push_back({catalog.intern(raw.label), std::move(raw.tokens)});
  }
  data.labels = catalog.labels();
  data.provenance = "uiuc:" + path.string();
  return data;
}

/// "label<TAB>sentence" lines; labels are indexed in order of first
/// appearance. With `segmented`, the sentence is a '|'-separated list of
/// words whose internal spaces become underscores.
inline Dataset load_tsv(const std::filesystem::path& path, bool segmented = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  detail::LabelCatalog catalog;
  Dataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip_cr(std::move(line));
    if (detail::blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("line without TAB separator", lineno);
    if (tab == 0) throw ParseError("empty label", lineno);
    const auto text = std::string_view(line).substr(tab + 1);
    try {
      TokenSeq tokens = segmented ? tokenize_segmented(text) : tokenize(text);
      data.examples.push_back({catalog.intern(line.substr(0, tab)), std::move(tokens)});
    } catch (const EmptyInputError&) {
      throw ParseError("empty sentence", lineno);
    }
  }
  if (data.examples.empty()) throw EmptyInputError("empty dataset file " + path.string());
  data.labels = catalog.labels();
  data.provenance = "tsv:" + path.string();
  return data;
}

/// Re-indexes `data` onto another label catalog (labels missing from the
/// catalog are a data error).
inline Dataset relabel(const Dataset& data, const std::vector<std::string>& catalog) {
  Dataset out;
  out.labels = catalog;
  out.provenance = data.provenance;
  for (const auto& ex : data.examples) {
    const auto& name = data.labels.at(ex.label);
    auto it = std::find(catalog.begin(), catalog.end(), name);
    if (it == catalog.end()) throw DataError("label '" + name + "' is not in the model's catalog");
    out.examples.push_back({static_cast<std::size_t>(it - catalog.begin()), ex.tokens});
  }
  return out;
}

inline void write_tsv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& ex : data.examples) {
    out << data.labels[ex.label] << '\t';
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      if (i) out << ' ';
      out << ex.tokens[i];
    }
    out << '\n';
  }
}

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::string> labels_missing_from_train;  // non-fatal warning
};

/// Seeded shuffle, then the first round(ratio * n) examples become training.
inline SplitResult split(const Dataset& data, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("split ratio must be in (0, 1)");
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng::stream(seed, 0x5b117);
  rng.shuffle(order);
  const auto cut = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(data.size())));
  SplitResult r;
  r.train.labels = r.test.labels = data.labels;
  r.train.provenance = data.provenance + "#train";
  r.test.provenance = data.provenance + "#test";
  std::vector<bool> seen(data.labels.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Example& ex = data.examples[order[i]];
    if (i < cut) {
      r.train.examples.push_back(ex);
      seen[ex.label] = true;
    } else {
      r.test.examples.push_back(ex);
    }
  }
  for (std::size_t l = 0; l < seen.size(); ++l) {
    if (!seen[l]) r.labels_missing_from_train.push_back(data.labels[l]);
  }
  return r;
}

/// Knobs of the seeded synthetic corpus.
///
/// Every sentence mixes filler words shared by all classes with a three-word
/// cue phrase whose word ORDER identifies the class (the same three cue words
/// occur in every class). With probability `keyword_rate` the sentence also
/// carries one or two class-specific keywords. Bag-of-words models can only
/// use the keywords; order-aware models can also read the cue.
struct SyntheticOptions {
  std::size_t classes = 5;
  std::size_t examples = 20000;
  std::size_t keywords_per_class = 40;
  std::size_t filler_words = 400;
  double keyword_rate = 0.9;
  std::size_t min_length = 6;
  std::size_t max_length = 16;
};

inline Dataset make_synthetic_corpus(const SyntheticOptions& opt, std::uint64_t seed) {
  if (opt.classes < 2 || opt.classes > 6) throw ParameterError("synthetic corpus supports 2-6 classes");
  if (opt.min_length < 4 || opt.max_length < opt.min_length) {
    throw ParameterError("synthetic sentence lengths must satisfy 4 <= min <= max");
  }
  static constexpr std::size_t kOrders[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  static const char* kCue[3] = {"cue_red", "cue_green", "cue_blue"};
  Rng rng = Rng::stream(seed, 0x5e7);
  Dataset data;
  for (std::size_t c = 0; c < opt.classes; ++c) data.labels.push_back("class" + std::to_string(c));
  data.provenance = "synthetic:seed=" + std::to_string(seed);
  for (std::size_t e = 0; e < opt.examples; ++e) {
    const std::size_t label = static_cast<std::size_t>(rng.below(opt.classes));
    const std::size_t len =
        opt.min_length + static_cast<std::size_t>(rng.below(opt.max_length - opt.min_length + 1));
    std::vector<std::string> words;
    for (std::size_t i = 0; i + 3 < len; ++i) {
      words.push_back("w" + std::to_string(rng.below(opt.filler_words)));
    }
    if (rng.uniform() < opt.keyword_rate) {
      const std::size_t count = 1 + static_cast<std::size_t>(rng.below(2));
      for (std::size_t k = 0; k < count && !words.empty(); ++k) {
        words[rng.below(words.size())] =
            "k" + std::to_string(label) + "_" + std::to_string(rng.below(opt.keywords_per_class));
      }
    }
    const std::size_t at = static_cast<std::size_t>(rng.below(words.size() + 1));
    const auto* order = kOrders[label];
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                 {kCue[order[0]], kCue[order[1]], kCue[order[2]]});
    data.examples.push_back({label, TokenSeq(std::move(words))});
  }
  return data;
}

/// Random vectors, uniform(-0.5, 0.5), for every distinct token of `data`.
inline EmbeddingTable make_synthetic_embeddings(const Dataset& data, std::size_t dim,
                                                std::uint64_t seed) {
  EmbeddingTable table(dim);
  Rng rng = Rng::stream(seed, 0xe3b);
  std::vector<double> vec(dim);
  for (const auto& ex : data.examples) {
    for (const auto& tok : ex.tokens.tokens) {
      if (table.contains(tok) || is_padding(tok)) continue;
      for (double& v : vec) v = rng.uniform(-0.5, 0.5);
      table.insert(tok, vec);
    }
  }
  return table;
}

}  // namespace sentclf
