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

/// Sentence CNN: w-gram convolution -> ReLU -> max-over-time pooling ->
/// fully connected ReLU layer -> dropout -> softmax regression.
struct CnnParams {
  Tensor filter;      // [o x d x w]
  Tensor conv_bias;   // [o]
  Tensor fc_weight;   // [o x h]
  Tensor fc_bias;     // [h]
  Tensor out_weight;  // [h x K]
  Tensor out_bias;    // [K]
  double dropout = 0.0;

  template <class Self, class Fn>
  static void visit(Self& self, Fn&& fn) {
    fn("cnn.filter", self.filter);
    fn("cnn.conv_bias", self.conv_bias);
    fn("cnn.fc_weight", self.fc_weight);
    fn("cnn.fc_bias", self.fc_bias);
    fn("cnn.out_weight", self.out_weight);
    fn("cnn.out_bias", self.out_bias);
  }

  std::size_t input_dim() const { return filter.extent(1); }
  std::size_t window() const { return filter.extent(2); }
  std::size_t num_classes() const { return out_weight.extent(1); }

  void validate() const {
    const bool ok = filter.rank() == 3 && conv_bias.rank() == 1 &&
                    conv_bias.extent(0) == filter.extent(0) && fc_weight.rank() == 2 &&
                    fc_weight.extent(0) == filter.extent(0) && fc_bias.rank() == 1 &&
                    fc_bias.extent(0) == fc_weight.extent(1) && out_weight.rank() == 2 &&
                    out_weight.extent(0) == fc_weight.extent(1) && out_bias.rank() == 1 &&
                    out_bias.extent(0) == out_weight.extent(1);
    if (!ok) throw DimensionError("CNN parameter shapes do not chain");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ParameterError("CNN dropout must be in [0, 1)");
  }
};

struct CnnTrace {
  std::optional<SequenceInput> input;
  Tensor conv;  // pre-activation [(n-w+1) x o]
  PoolResult pool;
  Tensor fc;  // post-ReLU [h]
  HeadTrace head;

  const Tensor& probs() const { return head.probs; }
};

inline CnnTrace cnn_forward(const CnnParams& p, const SequenceInput& x, bool train, Rng& rng) {
  detail::check_sequence_dim(x, p.input_dim());
  CnnTrace tr;
  tr.input = x;
  tr.conv = conv1d_wgram(x, p.filter, p.conv_bias);
  tr.pool = max_pool_time(relu(tr.conv));
  Tensor fc = p.fc_bias;
  detail::add_vec_mat(tr.pool.pooled.data(), p.fc_weight, fc.data());
  tr.fc = relu(std::move(fc));
  tr.head = head_forward(tr.fc, p.out_weight, p.out_bias, p.dropout, train, rng);
  return tr;
}

/// Accumulates scale * gradient of -log p[label]. Pooling routes the gradient
/// only to the argmax row of each filter.
inline void cnn_backward(const CnnParams& p, const CnnTrace& tr, std::size_t label,
                         CnnParams& grads, double scale = 1.0, Tensor* input_grad = nullptr) {
  if (!tr.input || tr.conv.extent(1) != p.filter.extent(0)) {
    throw DimensionError("CNN trace does not match parameters");
  }
  Tensor dfc = head_backward(tr.head, p.out_weight, label, scale, grads.out_weight, grads.out_bias);
  for (std::size_t j = 0; j < dfc.size(); ++j) {
    if (tr.fc[j] <= 0.0) dfc[j] = 0.0;
  }
  detail::add_scaled(dfc.data(), scale, grads.fc_bias.data());
  detail::add_outer(tr.pool.pooled.data(), dfc.data(), scale, grads.fc_weight);
  Tensor dpool({p.filter.extent(0)});
  detail::add_mat_vec(p.fc_weight, dfc.data(), dpool.data());
  Tensor dconv = Tensor::zeros_like(tr.conv);
  for (std::size_t i = 0; i < dpool.size(); ++i) {
    const std::size_t t = tr.pool.argmax[i];
    if (tr.conv.at(t, i) > 0.0) dconv.at(t, i) = dpool[i];
  }
  conv1d_wgram_backward(*tr.input, p.filter, dconv, scale, grads.filter, grads.conv_bias,
                        input_grad);
}

}  // namespace sentclf
