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
#include <numeric>
#include <vector>

#include "sentclf/model.hpp"
#include "sentclf/optim.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::size_t worst_coordinate = 0;  // flat index
};

// Denominators below this are treated as this value, so coordinates whose
// true gradient is ~0 are judged on absolute error.
inline constexpr double kGradCheckFloor = 1e-7;

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / denom;
}

/// Compares `analytic` with central differences of `loss` at `params`.
/// Every coordinate is checked unless there are more than `max_coordinates`,
/// in which case a seeded random subset of that size is used.
template <class P>
GradCheckResult grad_check(const P& params, const std::function<double(const P&)>& loss,
                           const P& analytic, double eps = 1e-5,
                           std::size_t max_coordinates = 1000, std::uint64_t seed = 7) {
  std::vector<double> flat = flatten(params);
  const std::vector<double> grad = flatten(analytic);
  if (grad.size() != flat.size()) throw DimensionError("analytic gradient has the wrong size");
  std::vector<std::size_t> coords(flat.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (coords.size() > max_coordinates) {
    Rng rng(seed);
    rng.shuffle(coords);
    coords.resize(max_coordinates);
    std::sort(coords.begin(), coords.end());
  }
  P probe = params;
  GradCheckResult res;
  for (std::size_t c : coords) {
    const double saved = flat[c];
    flat[c] = saved + eps;
    unflatten(flat, probe);
    const double up = loss(probe);
    flat[c] = saved - eps;
    unflatten(flat, probe);
    const double down = loss(probe);
    flat[c] = saved;
    const double err = relative_error(grad[c], (up - down) / (2.0 * eps));
    if (err > res.max_relative_error || res.coordinates_checked == 0) {
      res.max_relative_error = std::max(res.max_relative_error, err);
      if (err >= res.max_relative_error) res.worst_coordinate = c;
    }
    ++res.coordinates_checked;
  }
  return res;
}

/// Gradient check of a model's backward pass on one labelled input, in eval
/// mode (dropout off).
inline GradCheckResult grad_check(const ModelParams& params, const ModelInput& input,
                                  std::size_t label, double eps = 1e-5,
                                  std::size_t max_coordinates = 1000) {
  Rng rng(0);
  auto fwd = forward(params, input, false, rng);
  const ModelParams analytic = backward(params, fwd.trace, label);
  std::function<double(const ModelParams&)> loss = [&](const ModelParams& p) {
    Rng unused(0);
    return cross_entropy(forward(p, input, false, unused).probs, label);
  };
  return grad_check(params, loss, analytic, eps, max_coordinates);
}

}  // namespace sentclf
