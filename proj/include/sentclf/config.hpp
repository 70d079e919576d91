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

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sentclf/errors.hpp"
#include "sentclf/model.hpp"

namespace sentclf {

enum class Encoding { kGlove, kWord2Vec, kOneHot, kCounts };

inline std::string_view encoding_name(Encoding e) {
  switch (e) {
    case Encoding::kGlove: return "glove";
    case Encoding::kWord2Vec: return "word2vec";
    case Encoding::kOneHot: return "onehot";
    case Encoding::kCounts: return "counts";
  }
  return "?";
}

inline Encoding parse_encoding(std::string_view s) {
  if (s == "glove") return Encoding::kGlove;
  if (s == "word2vec") return Encoding::kWord2Vec;
  if (s == "onehot") return Encoding::kOneHot;
  if (s == "counts") return Encoding::kCounts;
  throw ConfigError("unknown encoding '" + std::string(s) + "'");
}

inline bool uses_embeddings(Encoding e) { return e == Encoding::kGlove || e == Encoding::kWord2Vec; }

/// Every knob of one training run. Defaults are the CNN settings of the UIUC
/// experiments.
struct RunConfig {
  std::string name = "run";
  Arch arch = Arch::kCnn;
  Encoding encoding = Encoding::kGlove;
  std::string embeddings;  // text file for glove, binary file for word2vec
  std::size_t dim = 1024;  // one-hot / count-vector dimension
  std::size_t window = 3;
  std::size_t conv_out = 256;
  std::size_t hidden = 128;
  double dropout = 0.1;
  std::string optimizer = "auto";  // auto: lbfgs for fnn, adagrad otherwise
  double lr = 1e-2;
  double decay = 1e-3;
  std::size_t batch = 128;
  int epochs = 100;
  std::size_t max_len = 20;
  std::uint64_t seed = 1;
  std::string train;
  std::string test;
  std::string format = "uiuc";
  double split = 0.8;
  std::size_t min_count = 2;
  std::string oov = "zero";
  bool fine_tune = false;
  bool segmented = false;
  std::size_t lbfgs_memory = 10;
  std::string out;

  std::string resolved_optimizer() const {
    if (optimizer != "auto") return optimizer;
    return arch == Arch::kFnn ? "lbfgs" : "adagrad";
  }

  /// Applies one key=value setting. Keys use '_' or '-' interchangeably.
  void set(std::string key, const std::string& value) {
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    auto to_size = [&](std::size_t& out) {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || p != value.data() + value.size()) {
        throw ConfigError("'" + key + "' expects a non-negative integer, got '" + value + "'");
      }
      out = static_cast<std::size_t>(v);
    };
    auto to_double = [&](double& out) {
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
      if (ec != std::errc() || p != value.data() + value.size()) {
        throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
      }
    };
    auto to_bool = [&](bool& out) {
      if (value == "1" || value == "true" || value == "yes") {
        out = true;
      } else if (value == "0" || value == "false" || value == "no") {
        out = false;
      } else {
        throw ConfigError("'" + key + "' expects true/false, got '" + value + "'");
      }
    };
    std::size_t tmp = 0;
    if (key == "name") name = value;
    else if (key == "arch") arch = parse_arch(value);
    else if (key == "encoding") encoding = parse_encoding(value);
    else if (key == "embeddings") embeddings = value;
    else if (key == "dim") to_size(dim);
    else if (key == "window") to_size(window);
    else if (key == "conv_out") to_size(conv_out);
    else if (key == "hidden") to_size(hidden);
    else if (key == "dropout") to_double(dropout);
    else if (key == "optimizer") optimizer = value;
    else if (key == "lr") to_double(lr);
    else if (key == "decay") to_double(decay);
    else if (key == "batch") to_size(batch);
    else if (key == "epochs") { to_size(tmp); epochs = static_cast<int>(tmp); }
    else if (key == "max_len") to_size(max_len);
    else if (key == "seed") { to_size(tmp); seed = tmp; }
    else if (key == "train") train = value;
    else if (key == "test") test = value;
    else if (key == "format") format = value;
    else if (key == "split") to_double(split);
    else if (key == "min_count") to_size(min_count);
    else if (key == "oov") oov = value;
    else if (key == "fine_tune") to_bool(fine_tune);
    else if (key == "segmented") to_bool(segmented);
    else if (key == "lbfgs_memory") to_size(lbfgs_memory);
    else if (key == "out") out = value;
    else throw ConfigError("unknown configuration key '" + key + "'");
  }

  /// Sorted key=value lines; parse_config_text() reads them back.
  std::string to_text() const {
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    std::map<std::string, std::string> kv{
        {"name", name},
        {"arch", std::string(arch_name(arch))},
        {"encoding", std::string(encoding_name(encoding))},
        {"embeddings", embeddings},
        {"dim", std::to_string(dim)},
        {"window", std::to_string(window)},
        {"conv_out", std::to_string(conv_out)},
        {"hidden", std::to_string(hidden)},
        {"dropout", num(dropout)},
        {"optimizer", optimizer},
        {"lr", num(lr)},
        {"decay", num(decay)},
        {"batch", std::to_string(batch)},
        {"epochs", std::to_string(epochs)},
        {"max_len", std::to_string(max_len)},
        {"seed", std::to_string(seed)},
        {"train", train},
        {"test", test},
        {"format", format},
        {"split", num(split)},
        {"min_count", std::to_string(min_count)},
        {"oov", oov},
        {"fine_tune", fine_tune ? "true" : "false"},
        {"segmented", segmented ? "true" : "false"},
        {"lbfgs_memory", std::to_string(lbfgs_memory)},
        {"out", out},
    };
    std::string text;
    for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
    return text;
  }

  /// Checks value ranges, encoding/architecture compatibility and that every
  /// referenced input file exists.
  void validate() const {
    namespace fs = std::filesystem;
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (window < 1 || conv_out < 1 || hidden < 1 || batch < 1 || max_len < 1 || min_count < 1) {
      throw ConfigError("window, conv_out, hidden, batch, max_len and min_count must be >= 1");
    }
    if (max_len < window && arch == Arch::kCnn) {
      throw ConfigError("max_len must be >= window for the CNN");
    }
    if (encoding == Encoding::kCounts && arch != Arch::kFnn) {
      throw ConfigError("count vectors feed the FNN only");
    }
    if (encoding != Encoding::kCounts && arch == Arch::kFnn) {
      throw ConfigError("the FNN takes count vectors (--encoding counts)");
    }
    if ((encoding == Encoding::kCounts || encoding == Encoding::kOneHot) && dim < 2) {
      throw ConfigError("hash dimension must be >= 2");
    }
    const auto opt = resolved_optimizer();
    if (opt != "adagrad" && opt != "sgd" && opt != "lbfgs") {
      throw ConfigError("unknown optimizer '" + optimizer + "'");
    }
    if (opt == "lbfgs" && arch != Arch::kFnn) {
      throw ConfigError("L-BFGS needs a deterministic objective; use it with the FNN only");
    }
    if (lr < 0.0 || decay < 0.0) throw ConfigError("lr and decay must be non-negative");
    if (format != "uiuc" && format != "tsv") throw ConfigError("format must be uiuc or tsv");
    if (oov != "zero" && oov != "random") throw ConfigError("oov must be zero or random");
    if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must be in (0, 1)");
    if (fine_tune && !uses_embeddings(encoding)) {
      throw ConfigError("fine_tune applies to embedding encodings only");
    }
    if (train.empty()) throw ConfigError("no training file given");
    if (!fs::exists(train)) throw ConfigError("training file not found: " + train);
    if (test.empty() && format == "uiuc") throw ConfigError("uiuc format needs a test file");
    if (!test.empty() && !fs::exists(test)) throw ConfigError("test file not found: " + test);
    if (uses_embeddings(encoding)) {
      if (embeddings.empty()) throw ConfigError("encoding needs --embeddings");
      if (!fs::exists(embeddings)) throw ConfigError("embeddings file not found: " + embeddings);
    }
  }
};

/// Flat key=value text: one setting per line, '#' starts a comment.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// A grid is a list of named runs. Settings before the first "[name]" header
/// are shared defaults; each section overrides them for one run.
inline std::vector<RunConfig> parse_grid_text(std::string_view text, const RunConfig& base = {}) {
  std::istringstream in{std::string(text)};
  std::string line, shared, section_name;
  std::vector<std::pair<std::string, std::string>> sections;
  bool in_section = false;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t");
    if (b != std::string::npos && line[b] == '[') {
      const auto e = line.find(']', b);
      if (e == std::string::npos) throw ConfigError("unterminated section header: " + line);
      sections.emplace_back(line.substr(b + 1, e - b - 1), "");
      in_section = true;
      continue;
    }
    (in_section ? sections.back().second : shared) += line + "\n";
  }
  if (sections.empty()) throw ConfigError("grid file defines no [run] sections");
  std::vector<RunConfig> runs;
  for (const auto& [name, body] : sections) {
    RunConfig cfg = base;
    apply_config_text(cfg, shared);
    apply_config_text(cfg, body);
    cfg.name = name;
    runs.push_back(std::move(cfg));
  }
  return runs;
}

}  // namespace sentclf
