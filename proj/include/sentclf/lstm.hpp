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

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "sentclf/errors.hpp"
#include "sentclf/head.hpp"
#include "sentclf/inputs.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

/// Gate slots, in storage order.
enum LstmGate : std::size_t { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };

/// LSTM cell, per step t with h_0 = c_0 = 0:
///
///   i = sigmoid(W_i x + U_i h + b_i)    f = sigmoid(W_f x + U_f h + b_f)
///   o = sigmoid(W_o x + U_o h + b_o)    u = tanh(W_u x + U_u h + b_u)
///   c_t = i * u + f * c_{t-1}           h_t = o * tanh(c_t)
///
/// The classification head reads h_n, as in the Elman network.
struct LstmParams {
  std::array<Tensor, 4> input_weight;      // [d x h] each
  std::array<Tensor, 4> recurrent_weight;  // [h x h] each
  std::array<Tensor, 4> bias;              // [h] each
  Tensor head_weight;                      // [h x K]
  Tensor head_bias;                        // [K]
  double dropout = 0.0;

  template <class Self, class Fn>
  static void visit(Self& self, Fn&& fn) {
    static constexpr const char* kNames[4] = {"i", "f", "o", "u"};
    for (std::size_t g = 0; g < 4; ++g) {
      fn(std::string("lstm.input_weight.") + kNames[g], self.input_weight[g]);
      fn(std::string("lstm.recurrent_weight.") + kNames[g], self.recurrent_weight[g]);
      fn(std::string("lstm.bias.") + kNames[g], self.bias[g]);
    }
    fn("lstm.head_weight", self.head_weight);
    fn("lstm.head_bias", self.head_bias);
  }

  std::size_t input_dim() const { return input_weight[0].extent(0); }
  std::size_t hidden() const { return input_weight[0].extent(1); }
  std::size_t num_classes() const { return head_weight.extent(1); }

  void validate() const {
    const std::size_t d = input_dim(), h = hidden();
    for (std::size_t g = 0; g < 4; ++g) {
      const bool ok = input_weight[g].rank() == 2 && input_weight[g].extent(0) == d &&
                      input_weight[g].extent(1) == h && recurrent_weight[g].rank() == 2 &&
                      recurrent_weight[g].extent(0) == h && recurrent_weight[g].extent(1) == h &&
                      bias[g].rank() == 1 && bias[g].extent(0) == h;
      if (!ok) throw DimensionError("LSTM gate " + std::to_string(g) + " shapes do not chain");
    }
    if (head_weight.rank() != 2 || head_weight.extent(0) != h || head_bias.rank() != 1 ||
        head_bias.extent(0) != head_weight.extent(1)) {
      throw DimensionError("LSTM head shapes do not chain");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ParameterError("LSTM dropout must be in [0, 1)");
  }
};

struct LstmTrace {
  std::optional<SequenceInput> input;
  std::array<Tensor, 4> gates;  // post-activation i, f, o, u; [n x h] each
  Tensor cell;                  // [n x h]
  Tensor hidden;                // [n x h]
  HeadTrace head;

  const Tensor& probs() const { return head.probs; }
};

inline LstmTrace lstm_forward(const LstmParams& p, const SequenceInput& x, bool train, Rng& rng) {
  detail::check_sequence_dim(x, p.input_dim());
  const std::size_t n = x.length(), h = p.hidden();
  LstmTrace tr;
  tr.input = x;
  for (std::size_t g = 0; g < 4; ++g) tr.gates[g] = project_rows(x, p.input_weight[g]);
  tr.cell = Tensor({n, h});
  tr.hidden = Tensor({n, h});
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t g = 0; g < 4; ++g) {
      auto pre = tr.gates[g].row(t);
      detail::add_scaled(p.bias[g].data(), 1.0, pre);
      if (t > 0) detail::add_vec_mat(tr.hidden.row(t - 1), p.recurrent_weight[g], pre);
      for (std::size_t j = 0; j < h; ++j) {
        pre[j] = g == kCandidate ? std::tanh(pre[j]) : detail::sigmoid(pre[j]);
      }
    }
    auto i = tr.gates[kInputGate].row(t);
    auto f = tr.gates[kForgetGate].row(t);
    auto o = tr.gates[kOutputGate].row(t);
    auto u = tr.gates[kCandidate].row(t);
    auto c = tr.cell.row(t);
    auto hs = tr.hidden.row(t);
    for (std::size_t j = 0; j < h; ++j) {
      c[j] = i[j] * u[j] + (t > 0 ? f[j] * tr.cell.at(t - 1, j) : 0.0);
      hs[j] = o[j] * std::tanh(c[j]);
    }
  }
  Tensor last({h});
  auto hn = tr.hidden.row(n - 1);
  std::copy(hn.begin(), hn.end(), last.data().begin());
  tr.head = head_forward(last, p.head_weight, p.head_bias, p.dropout, train, rng);
  return tr;
}

/// Full backpropagation through time over all six cell equations.
inline void lstm_backward(const LstmParams& p, const LstmTrace& tr, std::size_t label,
                          LstmParams& grads, double scale = 1.0, Tensor* input_grad = nullptr) {
  if (!tr.input || tr.hidden.extent(1) != p.hidden()) {
    throw DimensionError("LSTM trace does not match parameters");
  }
  const std::size_t n = tr.hidden.extent(0), h = p.hidden();
  Tensor dh = head_backward(tr.head, p.head_weight, label, scale, grads.head_weight,
                            grads.head_bias);
  Tensor dc({h});
  std::array<Tensor, 4> dpre;
  for (auto& t : dpre) t = Tensor({n, h});
  for (std::size_t t = n; t-- > 0;) {
    auto i = tr.gates[kInputGate].row(t);
    auto f = tr.gates[kForgetGate].row(t);
    auto o = tr.gates[kOutputGate].row(t);
    auto u = tr.gates[kCandidate].row(t);
    auto c = tr.cell.row(t);
    for (std::size_t j = 0; j < h; ++j) {
      const double tc = std::tanh(c[j]);
      const double dct = dc[j] + dh[j] * o[j] * (1.0 - tc * tc);
      const double c_prev = t > 0 ? tr.cell.at(t - 1, j) : 0.0;
      dpre[kOutputGate].at(t, j) = dh[j] * tc * o[j] * (1.0 - o[j]);
      dpre[kInputGate].at(t, j) = dct * u[j] * i[j] * (1.0 - i[j]);
      dpre[kForgetGate].at(t, j) = dct * c_prev * f[j] * (1.0 - f[j]);
      dpre[kCandidate].at(t, j) = dct * i[j] * (1.0 - u[j] * u[j]);
      dc[j] = dct * f[j];
    }
    for (std::size_t g = 0; g < 4; ++g) {
      detail::add_scaled(dpre[g].row(t), scale, grads.bias[g].data());
    }
    if (t == 0) break;
    dh.fill(0.0);
    for (std::size_t g = 0; g < 4; ++g) {
      detail::add_outer(tr.hidden.row(t - 1), dpre[g].row(t), scale, grads.recurrent_weight[g]);
      detail::add_mat_vec(p.recurrent_weight[g], dpre[g].row(t), dh.data());
    }
  }
  for (std::size_t g = 0; g < 4; ++g) {
    project_rows_backward(*tr.input, p.input_weight[g], dpre[g], scale, grads.input_weight[g],
                          input_grad);
  }
}

}  // namespace sentclf
