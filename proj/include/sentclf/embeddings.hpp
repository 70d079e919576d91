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

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentclf/errors.hpp"
#include "sentclf/murmur3.hpp"
#include "sentclf/tensor.hpp"
#include "sentclf/text.hpp"

namespace sentclf {

enum class OovPolicy { kZero, kRandomFixed };

/// Pre-trained word vectors keyed by token.
///
/// Out-of-vocabulary tokens resolve to the zero vector or, under
/// kRandomFixed, to a vector drawn once from uniform(-0.25, 0.25). The draw
/// for a token depends only on (seed, token), so it is stable across runs
/// and independent of lookup order. The OOV cache is internally locked;
/// everything else is read-only after loading.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 1, OovPolicy policy = OovPolicy::kZero,
                          std::uint64_t seed = 0)
      : dim_(dim), policy_(policy), seed_(seed), cache_(std::make_unique<OovCache>()) {
    if (dim_ < 1) throw ParameterError("embedding dimension must be >= 1");
  }

  EmbeddingTable(EmbeddingTable&&) noexcept = default;
  EmbeddingTable& operator=(EmbeddingTable&&) noexcept = default;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  OovPolicy policy() const { return policy_; }
  void set_policy(OovPolicy policy, std::uint64_t seed) {
    policy_ = policy;
    seed_ = seed;
    std::lock_guard lock(cache_->mutex);
    cache_->vectors.clear();
  }

  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }

  // Returns false (and keeps the first entry) when the token already exists.
  bool insert(std::string token, std::span<const double> vec) {
    if (vec.size() != dim_) {
      throw DimensionError("vector for '" + token + "' has length " +
                           std::to_string(vec.size()) + ", table dim is " +
                           std::to_string(dim_));
    }
    if (index_.contains(token)) return false;
    index_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    values_.insert(values_.end(), vec.begin(), vec.end());
    return true;
  }

  std::span<const double> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return {};
    return std::span<const double>(values_).subspan(it->second * dim_, dim_);
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

  // Vector used for `token` under the current policy (padding is zero).
  std::vector<double> resolve(std::string_view token) const {
    if (is_padding(token)) return std::vector<double>(dim_, 0.0);
    if (auto v = find(token); !v.empty()) return {v.begin(), v.end()};
    if (policy_ == OovPolicy::kZero) return std::vector<double>(dim_, 0.0);
    std::lock_guard lock(cache_->mutex);
    auto [it, inserted] = cache_->vectors.try_emplace(std::string(token));
    if (inserted) {
      Rng rng(seed_ ^ (static_cast<std::uint64_t>(murmur3_32(token, 0x5eed)) << 17));
      it->second.resize(dim_);
      for (double& x : it->second) x = rng.uniform(-0.25, 0.25);
    }
    return it->second;
  }

 private:
  struct OovCache {
    std::mutex mutex;
    std::unordered_map<std::string, std::vector<double>> vectors;
  };

  std::size_t dim_;
  OovPolicy policy_;
  std::uint64_t seed_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::unique_ptr<OovCache> cache_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

inline bool parse_double(std::string_view field, double& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline std::ifstream open_input(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Text vector files: one entry per line, token followed by its floats.
inline EmbeddingTable load_text_vectors(const std::filesystem::path& path,
                                        std::optional<std::size_t> expect_dim = std::nullopt) {
  auto in = detail::open_input(path, false);
  std::optional<EmbeddingTable> table;
  if (expect_dim) table.emplace(*expect_dim);
  std::string line;
  std::vector<double> vec;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    const std::size_t dim = fields.size() - 1;
    if (dim == 0) throw ParseError("malformed vector line: token without values", lineno);
    if (!table) table.emplace(dim);
    if (dim != table->dim()) {
      throw ParseError("malformed vector line: expected " + std::to_string(table->dim()) +
                           " values, found " + std::to_string(dim),
                       lineno);
    }
    vec.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!detail::parse_double(fields[i + 1], vec[i])) {
        throw ParseError("cannot parse float '" + std::string(fields[i + 1]) + "'", lineno);
      }
    }
    table->insert(std::string(fields[0]), vec);
  }
  if (!table) throw EmptyInputError("no vectors in " + path.string());
  return std::move(*table);
}

/// Binary vector files: ASCII header "<count> <dim>\n", then per record the
/// token bytes, one space, and dim little-endian float32 values. A newline
/// after a record is tolerated.
inline EmbeddingTable load_binary_vectors(const std::filesystem::path& path) {
  auto in = detail::open_input(path, true);
  std::string header;
  if (!std::getline(in, header)) throw DataError("missing header in " + path.string());
  auto fields = detail::split_fields(header);
  std::size_t count = 0, dim = 0;
  auto parse_count = [](std::string_view f, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
    return ec == std::errc() && ptr == f.data() + f.size();
  };
  if (fields.size() != 2 || !parse_count(fields[0], count) || !parse_count(fields[1], dim) ||
      dim == 0) {
    throw DataError("binary vector header must be two integers '<count> <dim>', got '" +
                    header + "'");
  }
  EmbeddingTable table(dim);
  std::vector<char> raw(dim * 4);
  std::vector<double> vec(dim);
  for (std::size_t r = 0; r < count; ++r) {
    auto eof = [&] {
      return DataError("unexpected EOF in record " + std::to_string(r) + " of " + path.string());
    };
    std::string token;
    int c;
    while ((c = in.get()) == '\n') {
    }
    while (c != EOF && c != ' ') {
      token.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF) throw eof();
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size()))) throw eof();
    for (std::size_t i = 0; i < dim; ++i) {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) {
        bits = (bits << 8) | static_cast<unsigned char>(raw[i * 4 + b]);
      }
      vec[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    table.insert(std::move(token), vec);
  }
  return table;
}

inline void write_text_vectors(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[64];
  for (const auto& tok : table.tokens()) {
    out << tok;
    for (double x : table.find(tok)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, ptr - buf);
    }
    out << '\n';
  }
}

inline void write_binary_vectors(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  for (const auto& tok : table.tokens()) {
    out << tok << ' ';
    for (double x : table.find(tok)) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(x));
      for (int b = 0; b < 4; ++b) out.put(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
    out << '\n';
  }
}

/// Sentence matrix [n x d]: row i is the vector of token i.
inline Tensor lookup_matrix(const EmbeddingTable& table, const TokenSeq& tokens) {
  if (tokens.empty()) throw EmptyInputError("lookup_matrix needs a non-empty sequence");
  Tensor x({tokens.size(), table.dim()});
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto v = table.resolve(tokens[i]);
    std::copy(v.begin(), v.end(), x.row(i).begin());
  }
  return x;
}

/// Hashed one-hot rows [n x dim]; padding rows are zero.
inline Tensor onehot_matrix(const TokenSeq& tokens, std::size_t dim) {
  if (tokens.empty()) throw EmptyInputError("onehot_matrix needs a non-empty sequence");
  if (dim < 2) throw ParameterError("one-hot dimension must be >= 2");
  Tensor x({tokens.size(), dim});
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_padding(tokens[i])) x.at(i, hash_index(tokens[i], dim)) = 1.0;
  }
  return x;
}

}  // namespace sentclf
