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

#include "sentclf/errors.hpp"
#include "sentclf/inputs.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

// Dropout followed by softmax regression: probs = softmax((v * mask)^T W + b).
// Shared by the convolutional and recurrent classifiers.
struct HeadTrace {
  Tensor mask;     // empty in eval mode
  Tensor dropped;  // v * mask
  Tensor probs;
};

inline HeadTrace head_forward(const Tensor& features, const Tensor& weight, const Tensor& bias,
                              double dropout, bool train, Rng& rng) {
  HeadTrace tr;
  tr.dropped = features;
  if (train && dropout > 0.0) {
    tr.mask = dropout_mask(features.size(), dropout, rng);
    for (std::size_t i = 0; i < features.size(); ++i) tr.dropped[i] *= tr.mask[i];
  }
  Tensor logits = bias;
  detail::add_vec_mat(tr.dropped.data(), weight, logits.data());
  tr.probs = softmax(std::move(logits));
  return tr;
}

// Accumulates head gradients; returns d(loss)/d(features), unscaled.
inline Tensor head_backward(const HeadTrace& tr, const Tensor& weight, std::size_t label,
                            double scale, Tensor& dweight, Tensor& dbias) {
  if (label >= tr.probs.size()) throw ParameterError("label out of range");
  Tensor dlogits = tr.probs;
  dlogits[label] -= 1.0;
  detail::add_outer(tr.dropped.data(), dlogits.data(), scale, dweight);
  detail::add_scaled(dlogits.data(), scale, dbias.data());
  Tensor dfeat({tr.dropped.size()});
  detail::add_mat_vec(weight, dlogits.data(), dfeat.data());
  if (!tr.mask.empty()) {
    for (std::size_t i = 0; i < dfeat.size(); ++i) dfeat[i] *= tr.mask[i];
  }
  return dfeat;
}

}  // namespace sentclf
