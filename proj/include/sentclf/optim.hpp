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
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sentclf/errors.hpp"
#include "sentclf/model.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

/// -log(probs[label]), with the probability clamped below at 1e-15.
inline double cross_entropy(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw ParameterError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[label], 1e-15));
}

inline double cross_entropy(const Tensor& probs, std::size_t label) {
  return cross_entropy(probs.data(), label);
}

namespace detail {

inline void check_aligned(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size()) throw DimensionError("parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i])) {
      throw DimensionError("gradient shape " + grads[i]->shape_string() +
                           " does not match parameter shape " + params[i]->shape_string());
    }
  }
}

}  // namespace detail

/// params -= lr * grads.
template <class P>
void sgd_step(P& params, const P& grads, double lr) {
  auto ps = tensor_list(params);
  auto gs = tensor_list(grads);
  detail::check_aligned(ps, gs);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps[i]->data();
    auto g = gs[i]->data();
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
  }
}

/// Adagrad with a 1/t learning-rate decay:
///
///   acc += g^2;  rate = lr / (1 + decay * step);  p -= rate * g / sqrt(acc + eps)
struct AdagradState {
  double learning_rate = 1e-2;
  double decay = 1e-3;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<Tensor> accumulators;

  double effective_rate() const {
    return learning_rate / (1.0 + decay * static_cast<double>(step));
  }
};

template <class P>
void adagrad_step(AdagradState& state, P& params, const P& grads) {
  auto ps = tensor_list(params);
  auto gs = tensor_list(grads);
  detail::check_aligned(ps, gs);
  if (state.accumulators.empty()) {
    for (const Tensor* p : ps) state.accumulators.push_back(Tensor::zeros_like(*p));
  }
  if (state.accumulators.size() != ps.size()) {
    throw DimensionError("Adagrad state was built for a different model");
  }
  const double rate = state.effective_rate();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!state.accumulators[i].same_shape(*ps[i])) {
      throw DimensionError("Adagrad state was built for a different model");
    }
    auto p = ps[i]->data();
    auto g = gs[i]->data();
    auto acc = state.accumulators[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j];
      if (gj == 0.0) continue;
      acc[j] += gj * gj;
      p[j] -= rate * gj / std::sqrt(acc[j] + state.epsilon);
    }
  }
  ++state.step;
}

struct LbfgsOptions {
  std::size_t memory = 10;
  int max_iter = 100;
  double tolerance = 1e-5;  // on the infinity norm of the gradient
  double c1 = 1e-4;         // Armijo constant
  double backtrack = 0.5;
  int max_trials = 20;
};

enum class LbfgsStatus { kConverged, kMaxIterations, kLineSearchFailed, kStopped };

inline const char* to_string(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::kConverged: return "converged";
    case LbfgsStatus::kMaxIterations: return "max-iterations";
    case LbfgsStatus::kLineSearchFailed: return "line-search-failed";
    case LbfgsStatus::kStopped: return "stopped";
  }
  return "?";
}

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  int iterations = 0;
  std::vector<double> trajectory;  // objective at x0 and after each iteration
};

/// Writes the gradient into `grad` and returns the objective value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;
/// Called after each accepted iteration; returning false stops the run.
using IterationCallback = std::function<bool(int iteration, std::span<const double> x, double f)>;

/// Correction pairs kept by L-BFGS. Pairs with s^T y <= 0 are rejected.
class LbfgsHistory {
 public:
  explicit LbfgsHistory(std::size_t memory) : memory_(memory) {
    if (memory_ < 1) throw ParameterError("L-BFGS memory must be >= 1");
  }

  bool push(std::vector<double> s, std::vector<double> y) {
    double sy = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      sy += s[i] * y[i];
      yy += y[i] * y[i];
    }
    if (!(sy > 1e-12 * std::max(1.0, yy))) return false;
    if (pairs_.size() == memory_) pairs_.pop_front();
    pairs_.push_back({std::move(s), std::move(y), 1.0 / sy, sy / yy});
    return true;
  }

  std::size_t size() const { return pairs_.size(); }
  void clear() { pairs_.clear(); }

  /// Two-loop recursion: returns -H g.
  std::vector<double> direction(std::span<const double> g) const {
    std::vector<double> q(g.begin(), g.end());
    std::vector<double> alpha(pairs_.size());
    for (std::size_t k = pairs_.size(); k-- > 0;) {
      const auto& p = pairs_[k];
      alpha[k] = p.rho * dot(p.s, q);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
    }
    const double gamma = pairs_.empty() ? 1.0 : pairs_.back().gamma;
    for (double& v : q) v *= gamma;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto& p = pairs_[k];
      const double beta = p.rho * dot(p.y, q);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * p.s[i];
    }
    for (double& v : q) v = -v;
    return q;
  }

 private:
  struct Pair {
    std::vector<double> s, y;
    double rho, gamma;
  };

  static double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }

  std::size_t memory_;
  std::deque<Pair> pairs_;
};

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Limited-memory BFGS with a backtracking Armijo line search.
inline LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                                  const LbfgsOptions& opt = {},
                                  const IterationCallback& on_iteration = {}) {
  LbfgsHistory history(opt.memory);
  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n), g_new(n), x_new(n);
  res.value = objective(res.x, g);
  res.trajectory.push_back(res.value);
  if (!std::isfinite(res.value)) {
    res.status = LbfgsStatus::kLineSearchFailed;
    return res;
  }
  if (inf_norm(g) < opt.tolerance) {
    res.status = LbfgsStatus::kConverged;
    return res;
  }
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    std::vector<double> d = history.direction(g);
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
    if (!(slope < 0.0)) {
      history.clear();
      d = history.direction(g);
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
    }
    double step = 1.0;
    if (history.size() == 0) {
      double l1 = 0.0;
      for (double v : g) l1 += std::abs(v);
      step = std::min(1.0, 1.0 / l1);
    }
    bool accepted = false;
    double f_new = 0.0;
    for (int trial = 0; trial < opt.max_trials; ++trial) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * d[i];
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + opt.c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= opt.backtrack;
    }
    if (!accepted) {
      res.status = LbfgsStatus::kLineSearchFailed;
      return res;
    }
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      y[i] = g_new[i] - g[i];
    }
    history.push(std::move(s), std::move(y));
    std::swap(res.x, x_new);
    std::swap(g, g_new);
    res.value = f_new;
    res.iterations = iter;
    res.trajectory.push_back(f_new);
    if (on_iteration && !on_iteration(iter, res.x, res.value)) {
      res.status = LbfgsStatus::kStopped;
      return res;
    }
    if (inf_norm(g) < opt.tolerance) {
      res.status = LbfgsStatus::kConverged;
      return res;
    }
  }
  res.status = LbfgsStatus::kMaxIterations;
  return res;
}

}  // namespace sentclf
