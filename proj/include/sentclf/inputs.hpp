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

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "sentclf/errors.hpp"
#include "sentclf/tensor.hpp"
#include "sentclf/text.hpp"

namespace sentclf {

/// Hashed one-hot sentence rows stored as column indices; -1 marks a padding
/// (all-zero) row. Equivalent to onehot_matrix() without materializing it.
struct OneHotRows {
  std::vector<std::int64_t> index;
  std::size_t dim = 0;

  static OneHotRows from_tokens(const TokenSeq& tokens, std::size_t dim) {
    OneHotRows rows{{}, dim};
    rows.index.reserve(tokens.size());
    for (const auto& tok : tokens.tokens) {
      rows.index.push_back(is_padding(tok) ? -1 : static_cast<std::int64_t>(hash_index(tok, dim)));
    }
    return rows;
  }

  Tensor dense() const {
    Tensor x({index.size(), dim});
    for (std::size_t t = 0; t < index.size(); ++t) {
      if (index[t] >= 0) x.at(t, static_cast<std::size_t>(index[t])) = 1.0;
    }
    return x;
  }
};

/// Sentence matrix for the sequence models: dense rows or hashed one-hot rows.
class SequenceInput {
 public:
  SequenceInput(Tensor dense) : rows_(std::move(dense)) {  // NOLINT
    if (std::get<Tensor>(rows_).rank() != 2) {
      throw DimensionError("sequence input must be [n x d], got " +
                           std::get<Tensor>(rows_).shape_string());
    }
  }
  SequenceInput(OneHotRows onehot) : rows_(std::move(onehot)) {}  // NOLINT

  bool is_dense() const { return std::holds_alternative<Tensor>(rows_); }
  const Tensor& dense() const { return std::get<Tensor>(rows_); }
  const OneHotRows& onehot() const { return std::get<OneHotRows>(rows_); }

  std::size_t length() const {
    return is_dense() ? dense().extent(0) : onehot().index.size();
  }
  std::size_t dim() const { return is_dense() ? dense().extent(1) : onehot().dim; }

 private:
  std::variant<Tensor, OneHotRows> rows_;
};

/// Sparse fixed-dimension vector (hashed count vectors).
struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;  // ascending index
  std::size_t dim = 0;

  static SparseVector from_dense(const Tensor& v) {
    if (v.rank() != 1) throw DimensionError("expected a vector, got " + v.shape_string());
    SparseVector s{{}, v.size()};
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) s.entries.emplace_back(i, v[i]);
    }
    return s;
  }

  Tensor dense() const {
    Tensor v({dim});
    for (auto [i, x] : entries) v[i] += x;
    return v;
  }
};

namespace detail {

// y += x^T W for x of length W.rows.
inline void add_vec_mat(std::span<const double> x, const Tensor& w, std::span<double> y) {
  const std::size_t cols = w.extent(1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = w.row(i).data();
    for (std::size_t j = 0; j < cols; ++j) y[j] += xi * row[j];
  }
}

// y += W v for v of length W.cols.
inline void add_mat_vec(const Tensor& w, std::span<const double> v, std::span<double> y) {
  const std::size_t cols = w.extent(1);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double* row = w.row(i).data();
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * v[j];
    y[i] += acc;
  }
}

// G += scale * a b^T.
inline void add_outer(std::span<const double> a, std::span<const double> b, double scale,
                      Tensor& g) {
  const std::size_t cols = g.extent(1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = scale * a[i];
    if (ai == 0.0) continue;
    double* row = g.row(i).data();
    for (std::size_t j = 0; j < cols; ++j) row[j] += ai * b[j];
  }
}

inline void add_scaled(std::span<const double> src, double scale, std::span<double> dst) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
}

inline void check_sequence_dim(const SequenceInput& in, std::size_t expected) {
  if (in.dim() != expected) {
    throw DimensionError("input row dimension " + std::to_string(in.dim()) +
                         " does not match model input dimension " + std::to_string(expected));
  }
  if (in.length() == 0) throw DimensionError("empty input sequence");
}

}  // namespace detail

/// w-gram convolution over either input representation.
inline Tensor conv1d_wgram(const SequenceInput& in, const Tensor& f, const Tensor& bias) {
  if (in.is_dense()) return conv1d_wgram(in.dense(), f, bias);
  const auto& rows = in.onehot();
  const std::size_t n = rows.index.size(), d = rows.dim;
  const std::size_t o = f.extent(0), w = f.extent(2);
  if (f.extent(1) != d || bias.extent(0) != o) {
    throw DimensionError("conv1d_wgram filter " + f.shape_string() +
                         " incompatible with one-hot dimension " + std::to_string(d));
  }
  if (n < w) {
    throw DimensionError("sentence too short for convolution: n=" + std::to_string(n) +
                         " < w=" + std::to_string(w));
  }
  const std::size_t steps = n - w + 1;
  Tensor y({steps, o});
  for (std::size_t t = 0; t < steps; ++t) {
    double* yt = y.row(t).data();
    for (std::size_t i = 0; i < o; ++i) yt[i] = bias[i];
    for (std::size_t k = 0; k < w; ++k) {
      const auto j = rows.index[t + k];
      if (j < 0) continue;
      const double* col = f.data().data() + static_cast<std::size_t>(j) * w + k;
      for (std::size_t i = 0; i < o; ++i) yt[i] += col[i * d * w];
    }
  }
  return y;
}

/// Accumulates scale * dL/dF and scale * dL/db for an upstream gradient dy
/// [(n-w+1) x o]. When input_grad is non-null and the input is dense, also
/// accumulates dL/dX into it.
inline void conv1d_wgram_backward(const SequenceInput& in, const Tensor& f, const Tensor& dy,
                                  double scale, Tensor& df, Tensor& dbias,
                                  Tensor* input_grad = nullptr) {
  const std::size_t steps = dy.extent(0), o = dy.extent(1);
  const std::size_t d = f.extent(1), w = f.extent(2);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < o; ++i) {
      const double g = scale * dy.at(t, i);
      if (g == 0.0) continue;
      dbias[i] += g;
      if (in.is_dense()) {
        const Tensor& x = in.dense();
        double* dfi = &df.at(i, 0, 0);
        const double* fi = f.data().data() + i * d * w;
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t k = 0; k < w; ++k) {
            dfi[j * w + k] += g * x.at(t + k, j);
            if (input_grad) input_grad->at(t + k, j) += g * fi[j * w + k];
          }
        }
      } else {
        const auto& rows = in.onehot();
        for (std::size_t k = 0; k < w; ++k) {
          const auto j = rows.index[t + k];
          if (j >= 0) df.at(i, static_cast<std::size_t>(j), k) += g;
        }
      }
    }
  }
}

/// Row-wise input projection Z = X W for W [d x h].
inline Tensor project_rows(const SequenceInput& in, const Tensor& w) {
  const std::size_t n = in.length(), h = w.extent(1);
  Tensor z({n, h});
  for (std::size_t t = 0; t < n; ++t) {
    if (in.is_dense()) {
      detail::add_vec_mat(in.dense().row(t), w, z.row(t));
    } else {
      const auto j = in.onehot().index[t];
      if (j >= 0) detail::add_scaled(w.row(static_cast<std::size_t>(j)), 1.0, z.row(t));
    }
  }
  return z;
}

/// Accumulates scale * X^T dZ into dW and, for dense inputs, scale * dZ W^T
/// into input_grad.
inline void project_rows_backward(const SequenceInput& in, const Tensor& w, const Tensor& dz,
                                  double scale, Tensor& dw, Tensor* input_grad = nullptr) {
  const std::size_t n = in.length();
  for (std::size_t t = 0; t < n; ++t) {
    if (in.is_dense()) {
      detail::add_outer(in.dense().row(t), dz.row(t), scale, dw);
      if (input_grad) {
        auto gx = input_grad->row(t);
        for (std::size_t j = 0; j < gx.size(); ++j) {
          double acc = 0.0;
          const double* wr = w.row(j).data();
          for (std::size_t c = 0; c < dz.extent(1); ++c) acc += wr[c] * dz.at(t, c);
          gx[j] += scale * acc;
        }
      }
    } else {
      const auto j = in.onehot().index[t];
      if (j >= 0) detail::add_scaled(dz.row(t), scale, dw.row(static_cast<std::size_t>(j)));
    }
  }
}

}  // namespace sentclf
