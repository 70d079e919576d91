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

#include <vector>

#include "sentclf/model.hpp"
#include "sentclf/optim.hpp"

namespace sentclf::testing {

struct Instance {
  ModelParams params;
  ModelInput input;
  std::size_t label = 0;
};

// A small random model and input (n <= 6, d <= 4, h <= 5, K <= 3) with every
// parameter, biases included, drawn from uniform(-0.8, 0.8).
inline Instance random_instance(Arch arch, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0x7e57);
  auto pick = [&](std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); };
  ArchSpec spec;
  spec.arch = arch;
  spec.input_dim = pick(1, 4);
  spec.num_classes = pick(2, 3);
  spec.hidden = {pick(1, 5)};
  spec.conv_out = pick(1, 4);
  spec.window = pick(1, 3);
  Instance inst;
  inst.params = init_params(spec, seed);
  visit_tensors(inst.params, [&](const std::string&, Tensor& t) {
    for (double& v : t.data()) v = rng.uniform(-0.8, 0.8);
  });
  if (arch == Arch::kFnn) {
    Tensor x({spec.input_dim});
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
    inst.input = SparseVector::from_dense(x);
  } else {
    const std::size_t n = pick(arch == Arch::kCnn ? spec.window : 1, 6);
    Tensor x({n, spec.input_dim});
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
    inst.input = SequenceInput(std::move(x));
  }
  inst.label = rng.below(spec.num_classes);
  return inst;
}

// Full-batch L-BFGS on an FNN asked to memorize 50 random count vectors with
// random labels out of 5 classes.
struct Memorization {
  LbfgsResult result;
  bool loss_monotone = true;
};

inline Memorization memorize_with_lbfgs(std::uint64_t seed, int max_iter = 200) {
  Rng rng = Rng::stream(seed, 0x3e3);
  const std::size_t n = 50, d = 64, k = 5;
  std::vector<SparseVector> xs;
  std::vector<std::size_t> ys;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor x({d});
    for (int w = 0; w < 6; ++w) x[rng.below(d)] += 1.0;
    xs.push_back(SparseVector::from_dense(x));
    ys.push_back(rng.below(k));
  }
  ModelParams params = init_params({Arch::kFnn, d, k, {32}, 1, 1, 0.0}, seed);
  ModelParams grads = zeros_like(params);
  Objective objective = [&](std::span<const double> x, std::span<double> g) {
    unflatten(x, params);
    zero_fill(grads);
    Rng unused(0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto fwd = forward(params, xs[i], false, unused);
      loss += cross_entropy(fwd.probs, ys[i]);
      accumulate_backward(params, fwd.trace, ys[i], grads, 1.0 / n);
    }
    auto flat = flatten(grads);
    std::copy(flat.begin(), flat.end(), g.begin());
    return loss / n;
  };
  LbfgsOptions opt;
  opt.max_iter = max_iter;
  opt.tolerance = 1e-6;
  Memorization m;
  m.result = lbfgs_minimize(objective, flatten(params), opt);
  for (std::size_t i = 1; i < m.result.trajectory.size(); ++i) {
    if (m.result.trajectory[i] > m.result.trajectory[i - 1]) m.loss_monotone = false;
  }
  return m;
}

}  // namespace sentclf::testing
