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
#include <optional>

#include "sentclf/errors.hpp"
#include "sentclf/head.hpp"
#include "sentclf/inputs.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

/// Elman network h_t = sigmoid(W x_t + U h_{t-1} + b), h_0 = 0. Only the last
/// hidden state reaches the dropout + softmax head.
struct RnnParams {
  Tensor input_weight;      // [d x h]
  Tensor recurrent_weight;  // [h x h]
  Tensor hidden_bias;       // [h]
  Tensor head_weight;       // [h x K]
  Tensor head_bias;         // [K]
  double dropout = 0.0;

  template <class Self, class Fn>
  static void visit(Self& self, Fn&& fn) {
    fn("rnn.input_weight", self.input_weight);
    fn("rnn.recurrent_weight", self.recurrent_weight);
    fn("rnn.hidden_bias", self.hidden_bias);
    fn("rnn.head_weight", self.head_weight);
    fn("rnn.head_bias", self.head_bias);
  }

  std::size_t input_dim() const { return input_weight.extent(0); }
  std::size_t hidden() const { return input_weight.extent(1); }
  std::size_t num_classes() const { return head_weight.extent(1); }

  void validate() const {
    const std::size_t h = input_weight.extent(1);
    const bool ok = input_weight.rank() == 2 && recurrent_weight.rank() == 2 &&
                    recurrent_weight.extent(0) == h && recurrent_weight.extent(1) == h &&
                    hidden_bias.rank() == 1 && hidden_bias.extent(0) == h &&
                    head_weight.rank() == 2 && head_weight.extent(0) == h &&
                    head_bias.rank() == 1 && head_bias.extent(0) == head_weight.extent(1);
    if (!ok) throw DimensionError("RNN parameter shapes do not chain");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ParameterError("RNN dropout must be in [0, 1)");
  }
};

struct RnnTrace {
  std::optional<SequenceInput> input;
  Tensor hidden;  // [n x h], row t holds h_{t+1}
  HeadTrace head;

  const Tensor& probs() const { return head.probs; }
};

inline RnnTrace rnn_forward(const RnnParams& p, const SequenceInput& x, bool train, Rng& rng) {
  detail::check_sequence_dim(x, p.input_dim());
  const std::size_t n = x.length(), h = p.hidden();
  RnnTrace tr;
  tr.input = x;
  tr.hidden = project_rows(x, p.input_weight);
  for (std::size_t t = 0; t < n; ++t) {
    auto row = tr.hidden.row(t);
    detail::add_scaled(p.hidden_bias.data(), 1.0, row);
    if (t > 0) detail::add_vec_mat(tr.hidden.row(t - 1), p.recurrent_weight, row);
    for (std::size_t j = 0; j < h; ++j) row[j] = detail::sigmoid(row[j]);
  }
  Tensor last({h});
  auto hn = tr.hidden.row(n - 1);
  std::copy(hn.begin(), hn.end(), last.data().begin());
  tr.head = head_forward(last, p.head_weight, p.head_bias, p.dropout, train, rng);
  return tr;
}

/// Full backpropagation through time.
inline void rnn_backward(const RnnParams& p, const RnnTrace& tr, std::size_t label,
                         RnnParams& grads, double scale = 1.0, Tensor* input_grad = nullptr) {
  if (!tr.input || tr.hidden.extent(1) != p.hidden()) {
    throw DimensionError("RNN trace does not match parameters");
  }
  const std::size_t n = tr.hidden.extent(0), h = p.hidden();
  Tensor dh = head_backward(tr.head, p.head_weight, label, scale, grads.head_weight,
                            grads.head_bias);
  Tensor dpre({n, h});
  for (std::size_t t = n; t-- > 0;) {
    auto ht = tr.hidden.row(t);
    auto da = dpre.row(t);
    for (std::size_t j = 0; j < h; ++j) da[j] = dh[j] * ht[j] * (1.0 - ht[j]);
    detail::add_scaled(da, scale, grads.hidden_bias.data());
    if (t == 0) break;
    detail::add_outer(tr.hidden.row(t - 1), da, scale, grads.recurrent_weight);
    dh.fill(0.0);
    detail::add_mat_vec(p.recurrent_weight, da, dh.data());
  }
  project_rows_backward(*tr.input, p.input_weight, dpre, scale, grads.input_weight, input_grad);
}

}  // namespace sentclf
