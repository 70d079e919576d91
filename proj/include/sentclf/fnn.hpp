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
#include <string>
#include <vector>

#include "sentclf/errors.hpp"
#include "sentclf/inputs.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

/// Feed-forward network y(x) = f_L(... f_1(W_1^T x + b_1) ...). Hidden layers
/// are logistic, the output layer is softmax. weights[l] is [in x out].
struct FnnParams {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;

  template <class Self, class Fn>
  static void visit(Self& self, Fn&& fn) {
    for (std::size_t l = 0; l < self.weights.size(); ++l) {
      fn("fnn.w" + std::to_string(l), self.weights[l]);
      fn("fnn.b" + std::to_string(l), self.biases[l]);
    }
  }

  std::size_t input_dim() const { return weights.front().extent(0); }
  std::size_t num_classes() const { return weights.back().extent(1); }

  void validate() const {
    if (weights.empty() || weights.size() != biases.size()) {
      throw DimensionError("FNN needs matching non-empty weight and bias lists");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].rank() != 2 || biases[l].rank() != 1 ||
          biases[l].extent(0) != weights[l].extent(1) ||
          (l > 0 && weights[l].extent(0) != weights[l - 1].extent(1))) {
        throw DimensionError("FNN layer " + std::to_string(l) + " does not chain: weight " +
                             weights[l].shape_string() + ", bias " + biases[l].shape_string());
      }
    }
  }
};

struct FnnTrace {
  SparseVector input;
  std::vector<Tensor> activations;  // hidden layer outputs
  Tensor probs;
};

inline FnnTrace fnn_forward(const FnnParams& p, const SparseVector& x) {
  if (x.dim != p.input_dim()) {
    throw DimensionError("FNN input length " + std::to_string(x.dim) + " != " +
                         std::to_string(p.input_dim()));
  }
  FnnTrace tr;
  tr.input = x;
  const std::size_t layers = p.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Tensor z = p.biases[l];
    if (l == 0) {
      for (auto [j, v] : x.entries) detail::add_scaled(p.weights[0].row(j), v, z.data());
    } else {
      detail::add_vec_mat(tr.activations.back().data(), p.weights[l], z.data());
    }
    if (l + 1 < layers) {
      tr.activations.push_back(sigmoid(std::move(z)));
    } else {
      tr.probs = softmax(std::move(z));
    }
  }
  return tr;
}

inline FnnTrace fnn_forward(const FnnParams& p, const Tensor& x) {
  return fnn_forward(p, SparseVector::from_dense(x));
}

/// Accumulates scale * d(-log p[label]) / d(params) into grads.
inline void fnn_backward(const FnnParams& p, const FnnTrace& tr, std::size_t label,
                         FnnParams& grads, double scale = 1.0) {
  const std::size_t layers = p.weights.size();
  if (tr.activations.size() + 1 != layers || grads.weights.size() != layers) {
    throw DimensionError("FNN trace/gradient does not match parameters");
  }
  if (label >= p.num_classes()) throw ParameterError("label out of range");
  Tensor delta = tr.probs;
  delta[label] -= 1.0;
  for (std::size_t l = layers; l-- > 0;) {
    detail::add_scaled(delta.data(), scale, grads.biases[l].data());
    if (l == 0) {
      for (auto [j, v] : tr.input.entries) {
        detail::add_scaled(delta.data(), scale * v, grads.weights[0].row(j));
      }
      break;
    }
    const Tensor& a = tr.activations[l - 1];
    detail::add_outer(a.data(), delta.data(), scale, grads.weights[l]);
    Tensor prev({a.size()});
    detail::add_mat_vec(p.weights[l], delta.data(), prev.data());
    for (std::size_t i = 0; i < a.size(); ++i) prev[i] *= a[i] * (1.0 - a[i]);
    delta = std::move(prev);
  }
}

}  // namespace sentclf
