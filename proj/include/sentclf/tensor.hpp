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
#include <functional>
#include <initializer_list>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sentclf/errors.hpp"

namespace sentclf {

/// Dense row-major array of doubles with rank 1 to 3.
///
/// A default-constructed tensor is empty (rank 0, no data) and only serves
/// as a placeholder; every tensor built from a shape has all extents >= 1.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)) {
    check_shape(shape_);
    data_.assign(count(shape_), fill);
  }

  Tensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != count(shape_)) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + describe(shape_));
    }
  }

  static Tensor vector(std::initializer_list<double> values) {
    return Tensor({values.size()}, std::vector<double>(values));
  }

  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(m * n);
    for (const auto& row : rows) {
      if (row.size() != n) throw DimensionError("ragged matrix literal");
      data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor({m, n}, std::move(data));
  }

  static Tensor zeros_like(const Tensor& other) {
    Tensor t;
    t.shape_ = other.shape_;
    t.data_.assign(other.data_.size(), 0.0);
    return t;
  }

  std::size_t rank() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  // Row views of a rank-2 tensor.
  std::span<double> row(std::size_t i) {
    return std::span<double>(data_).subspan(i * shape_[1], shape_[1]);
  }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * shape_[1], shape_[1]);
  }

  void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  std::string shape_string() const { return describe(shape_); }

  friend bool operator==(const Tensor&, const Tensor&) = default;

  static std::string describe(const std::vector<std::size_t>& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) out << 'x';
      out << shape[i];
    }
    out << ']';
    return out.str();
  }

 private:
  static std::size_t count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

  static void check_shape(const std::vector<std::size_t>& shape) {
    if (shape.empty() || shape.size() > 3) {
      throw DimensionError("tensor rank must be 1 to 3, got shape " + describe(shape));
    }
    for (auto e : shape) {
      if (e == 0) throw DimensionError("zero extent in shape " + describe(shape));
    }
  }

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// Deterministic generator. The engine and every derived distribution are
/// fully specified here so draws match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(mix(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ParameterError("Rng::below needs n >= 1");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % n;
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // Independent stream derived from this generator's seed material.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix(seed) ^ mix(stream_id + 0x9e3779b97f4a7c15ULL));
  }

  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0)) {
    throw DimensionError("matmul shape mismatch: " + a.shape_string() + " x " +
                         b.shape_string());
  }
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  Tensor c({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    double* out = c.row(i).data();
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a.at(i, p);
      if (aip == 0.0) continue;
      const double* brow = b.row(p).data();
      for (std::size_t j = 0; j < n; ++j) out[j] += aip * brow[j];
    }
  }
  return c;
}

/// Sliding w-gram convolution of a sentence matrix x [n x d] with a filter
/// bank f [o x d x w]:
///
///   y(t, i) = sum_j sum_k f(i, j, k) * x(t + k, j) + bias(i),  t < n - w + 1
inline Tensor conv1d_wgram(const Tensor& x, const Tensor& f, const Tensor& bias) {
  if (x.rank() != 2 || f.rank() != 3 || bias.rank() != 1) {
    throw DimensionError("conv1d_wgram expects x [n x d], f [o x d x w], bias [o]; got " +
                         x.shape_string() + ", " + f.shape_string() + ", " +
                         bias.shape_string());
  }
  const std::size_t n = x.extent(0), d = x.extent(1);
  const std::size_t o = f.extent(0), w = f.extent(2);
  if (f.extent(1) != d || bias.extent(0) != o) {
    throw DimensionError("conv1d_wgram filter " + f.shape_string() + " / bias " +
                         bias.shape_string() + " incompatible with input " +
                         x.shape_string());
  }
  if (n < w) {
    throw DimensionError("sentence too short for convolution: n=" + std::to_string(n) +
                         " < w=" + std::to_string(w));
  }
  const std::size_t steps = n - w + 1;
  Tensor y({steps, o});
  const double* xs = x.data().data();
  const double* fs = f.data().data();
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < o; ++i) {
      const double* fi = fs + i * d * w;
      double acc = bias[i];
      for (std::size_t j = 0; j < d; ++j) {
        const double* fij = fi + j * w;
        for (std::size_t k = 0; k < w; ++k) acc += fij[k] * xs[(t + k) * d + j];
      }
      y.at(t, i) = acc;
    }
  }
  return y;
}

inline Tensor relu(Tensor y) {
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

struct PoolResult {
  Tensor pooled;
  std::vector<std::size_t> argmax;
};

/// Column-wise maximum over the time axis. Ties resolve to the earliest row.
inline PoolResult max_pool_time(const Tensor& y) {
  if (y.rank() != 2) throw DimensionError("max_pool_time expects rank 2, got " + y.shape_string());
  const std::size_t steps = y.extent(0), o = y.extent(1);
  PoolResult r{Tensor({o}), std::vector<std::size_t>(o, 0)};
  for (std::size_t i = 0; i < o; ++i) r.pooled[i] = y.at(0, i);
  for (std::size_t t = 1; t < steps; ++t) {
    for (std::size_t i = 0; i < o; ++i) {
      if (y.at(t, i) > r.pooled[i]) {
        r.pooled[i] = y.at(t, i);
        r.argmax[i] = t;
      }
    }
  }
  return r;
}

namespace detail {

inline void softmax_inplace(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

inline Tensor softmax(Tensor z) {
  if (z.rank() != 1) throw DimensionError("softmax expects rank 1, got " + z.shape_string());
  detail::softmax_inplace(z.data());
  return z;
}

inline Tensor sigmoid(Tensor z) {
  for (double& v : z.data()) v = detail::sigmoid(v);
  return z;
}

/// Inverted dropout mask: 0 with probability p, otherwise 1 / (1 - p).
inline Tensor dropout_mask(std::size_t len, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ParameterError("dropout probability must be in [0, 1), got " + std::to_string(p));
  }
  Tensor mask({len}, 1.0);
  if (p == 0.0) return mask;
  const double keep = 1.0 / (1.0 - p);
  for (double& v : mask.data()) v = rng.uniform() < p ? 0.0 : keep;
  return mask;
}

}  // namespace sentclf
