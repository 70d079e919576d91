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
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentclf/errors.hpp"
#include "sentclf/murmur3.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

inline const std::string kPadToken = "<pad>";
inline const std::string kUnknownToken = "<unk>";

inline bool is_padding(std::string_view token) { return token == kPadToken; }

/// A sentence as an ordered token list. `length` is the token count before
/// any padding was appended.
struct TokenSeq {
  std::vector<std::string> tokens;
  std::size_t length = 0;

  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> toks)
      : tokens(std::move(toks)), length(tokens.size()) {}

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

namespace detail {

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// Appends one whitespace-delimited word, peeling leading and trailing ASCII
// punctuation off as single-character tokens. All-punctuation words stay whole.
inline void push_word(std::string_view word, std::vector<std::string>& out) {
  std::size_t lo = 0, hi = word.size();
  while (lo < hi && is_punct(static_cast<unsigned char>(word[lo]))) ++lo;
  if (lo == hi) {
    out.emplace_back(word);
    return;
  }
  while (hi > lo && is_punct(static_cast<unsigned char>(word[hi - 1]))) --hi;
  for (std::size_t i = 0; i < lo; ++i) out.emplace_back(1, word[i]);
  out.emplace_back(word.substr(lo, hi - lo));
  for (std::size_t i = hi; i < word.size(); ++i) out.emplace_back(1, word[i]);
}

}  // namespace detail

/// Lowercases ASCII letters, splits on whitespace and separates leading and
/// trailing punctuation. Non-ASCII bytes pass through unchanged.
inline TokenSeq tokenize(std::string_view text) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), detail::ascii_lower);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < lowered.size()) {
    while (i < lowered.size() && detail::is_space(static_cast<unsigned char>(lowered[i]))) ++i;
    std::size_t j = i;
    while (j < lowered.size() && !detail::is_space(static_cast<unsigned char>(lowered[j]))) ++j;
    if (j > i) detail::push_word(std::string_view(lowered).substr(i, j - i), tokens);
    i = j;
  }
  if (tokens.empty()) throw EmptyInputError("empty sentence");
  return TokenSeq(std::move(tokens));
}

/// Joins the syllables of each pre-segmented word with underscores so a
/// multi-syllable word becomes a single token.
inline TokenSeq normalize_vietnamese(const TokenSeq& words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& word : words.tokens) {
    std::string token;
    bool pending_gap = false;
    for (char c : word) {
      if (detail::is_space(static_cast<unsigned char>(c))) {
        pending_gap = !token.empty();
        continue;
      }
      if (pending_gap) token.push_back('_');
      pending_gap = false;
      token.push_back(c);
    }
    if (!token.empty()) out.push_back(std::move(token));
  }
  return TokenSeq(std::move(out));
}

/// Splits a pre-segmented sentence on an explicit word delimiter, lowercases
/// and normalizes the resulting words.
inline TokenSeq tokenize_segmented(std::string_view text, char delimiter = '|') {
  std::vector<std::string> words;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == delimiter) {
      std::string word(text.substr(start, i - start));
      std::transform(word.begin(), word.end(), word.begin(), detail::ascii_lower);
      words.push_back(std::move(word));
      start = i + 1;
    }
  }
  TokenSeq seq = normalize_vietnamese(TokenSeq(std::move(words)));
  if (seq.empty()) throw EmptyInputError("empty sentence");
  return seq;
}

/// Token to index bijection over the training corpus. Index 0 is padding,
/// index 1 is the unknown token; kept tokens start at 2.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnknown = 1;

  Vocabulary() : tokens_{kPadToken, kUnknownToken}, frequency_{0, 0} {}

  static Vocabulary build(const std::vector<TokenSeq>& corpus, std::size_t min_count) {
    if (min_count < 1) throw ParameterError("min_count must be >= 1");
    if (corpus.empty()) throw EmptyInputError("cannot build a vocabulary from an empty corpus");
    std::map<std::string, std::size_t> counts;
    for (const auto& seq : corpus) {
      for (const auto& tok : seq.tokens) {
        if (!is_padding(tok)) ++counts[tok];
      }
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [tok, n] : counts) {
      if (n >= min_count) kept.emplace_back(tok, n);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary v;
    for (auto& [tok, n] : kept) v.add(tok, n);
    return v;
  }

  // Rebuilds from a stored token list (frequencies unknown, recorded as 0).
  static Vocabulary from_tokens(const std::vector<std::string>& kept) {
    Vocabulary v;
    for (const auto& tok : kept) v.add(tok, 0);
    return v;
  }

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }

  std::size_t index_of(std::string_view token) const {
    if (is_padding(token)) return kPad;
    auto it = index_.find(std::string(token));
    return it == index_.end() ? kUnknown : it->second;
  }

  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::size_t frequency(std::size_t index) const { return frequency_.at(index); }

  // Kept tokens in index order (excludes the two reserved entries).
  std::vector<std::string> kept_tokens() const {
    return {tokens_.begin() + 2, tokens_.end()};
  }

 private:
  void add(const std::string& token, std::size_t freq) {
    index_.emplace(token, tokens_.size());
    tokens_.push_back(token);
    frequency_.push_back(freq);
  }

  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> tokens_;
  std::vector<std::size_t> frequency_;
};

inline std::size_t hash_index(std::string_view token, std::size_t dim) {
  if (dim < 2) throw ParameterError("hash dimension must be >= 2");
  return static_cast<std::size_t>(murmur3_32(token, 0)) % dim;
}

/// Hashed unigram counts. Padding tokens are not counted.
inline Tensor count_vector(const TokenSeq& tokens, std::size_t dim) {
  Tensor v({dim});
  for (const auto& tok : tokens.tokens) {
    if (!is_padding(tok)) v[hash_index(tok, dim)] += 1.0;
  }
  return v;
}

inline TokenSeq pad_or_truncate(const TokenSeq& tokens, std::size_t max_len) {
  if (max_len < 1) throw ParameterError("max_len must be >= 1");
  TokenSeq out;
  out.length = std::min(tokens.length, max_len);
  out.tokens.assign(tokens.tokens.begin(),
                    tokens.tokens.begin() + std::min(tokens.size(), max_len));
  out.tokens.resize(max_len, kPadToken);
  return out;
}

}  // namespace sentclf
