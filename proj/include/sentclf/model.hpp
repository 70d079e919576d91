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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "sentclf/cnn.hpp"
#include "sentclf/errors.hpp"
#include "sentclf/fnn.hpp"
#include "sentclf/inputs.hpp"
#include "sentclf/lstm.hpp"
#include "sentclf/rnn.hpp"
#include "sentclf/tensor.hpp"

namespace sentclf {

enum class Arch { kFnn, kCnn, kRnn, kLstm };

inline std::string_view arch_name(Arch a) {
  switch (a) {
    case Arch::kFnn: return "fnn";
    case Arch::kCnn: return "cnn";
    case Arch::kRnn: return "rnn";
    case Arch::kLstm: return "lstm";
  }
  return "?";
}

inline Arch parse_arch(std::string_view s) {
  if (s == "fnn") return Arch::kFnn;
  if (s == "cnn") return Arch::kCnn;
  if (s == "rnn") return Arch::kRnn;
  if (s == "lstm") return Arch::kLstm;
  throw ConfigError("unknown architecture '" + std::string(s) + "'");
}

/// Widths needed to allocate a model.
struct ArchSpec {
  Arch arch = Arch::kCnn;
  std::size_t input_dim = 1;
  std::size_t num_classes = 2;
  std::vector<std::size_t> hidden = {128};  // FNN hidden layers; first entry elsewhere
  std::size_t conv_out = 256;
  std::size_t window = 3;
  double dropout = 0.1;
};

using ModelParams = std::variant<FnnParams, CnnParams, RnnParams, LstmParams>;
using ModelInput = std::variant<SparseVector, SequenceInput>;

// Visits (name, tensor) pairs of any parameter struct, a bare tensor or a
// tensor list, in a fixed order.
template <class P, class Fn>
void visit_tensors(P& params, Fn&& fn) {
  using Bare = std::remove_const_t<P>;
  if constexpr (std::is_same_v<Bare, ModelParams>) {
    std::visit([&](auto& p) { visit_tensors(p, fn); }, params);
  } else if constexpr (std::is_same_v<Bare, Tensor>) {
    fn(std::string("tensor"), params);
  } else if constexpr (std::is_same_v<Bare, std::vector<Tensor>>) {
    for (std::size_t i = 0; i < params.size(); ++i) fn("tensor" + std::to_string(i), params[i]);
  } else {
    Bare::visit(params, fn);
  }
}

template <class P>
auto tensor_list(P& params) {
  using Ptr = std::conditional_t<std::is_const_v<P>, const Tensor*, Tensor*>;
  std::vector<Ptr> out;
  visit_tensors(params, [&](const std::string&, auto& t) { out.push_back(&t); });
  return out;
}

template <class P>
std::size_t parameter_count(const P& params) {
  std::size_t n = 0;
  for (const Tensor* t : tensor_list(params)) n += t->size();
  return n;
}

/// Same structure as `params` with every tensor zeroed (the gradient shape).
template <class P>
P zeros_like(const P& params) {
  P out = params;
  for (Tensor* t : tensor_list(out)) t->fill(0.0);
  return out;
}

template <class P>
void zero_fill(P& params) {
  for (Tensor* t : tensor_list(params)) t->fill(0.0);
}

template <class P>
std::vector<double> flatten(const P& params) {
  std::vector<double> flat;
  flat.reserve(parameter_count(params));
  for (const Tensor* t : tensor_list(params)) {
    flat.insert(flat.end(), t->data().begin(), t->data().end());
  }
  return flat;
}

template <class P>
void unflatten(std::span<const double> flat, P& params) {
  if (flat.size() != parameter_count(params)) {
    throw DimensionError("flat parameter length " + std::to_string(flat.size()) +
                         " != model size " + std::to_string(parameter_count(params)));
  }
  std::size_t off = 0;
  for (Tensor* t : tensor_list(params)) {
    std::copy(flat.begin() + off, flat.begin() + off + t->size(), t->data().begin());
    off += t->size();
  }
}

inline Arch arch_of(const ModelParams& p) {
  return static_cast<Arch>(p.index());
}

inline std::size_t num_classes(const ModelParams& p) {
  return std::visit([](const auto& m) { return m.num_classes(); }, p);
}

inline std::size_t input_dim(const ModelParams& p) {
  return std::visit([](const auto& m) { return m.input_dim(); }, p);
}

namespace detail {

inline Tensor glorot(std::vector<std::size_t> shape, std::size_t fan_in, std::size_t fan_out,
                     Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

inline void require_positive(std::size_t v, const char* what) {
  if (v < 1) throw ParameterError(std::string(what) + " must be >= 1");
}

}  // namespace detail

/// Weights ~ uniform(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))),
/// biases zero except the LSTM forget gate (1.0). Deterministic per seed.
inline ModelParams init_params(const ArchSpec& spec, std::uint64_t seed) {
  detail::require_positive(spec.input_dim, "input dimension");
  detail::require_positive(spec.num_classes, "class count");
  if (!(spec.dropout >= 0.0 && spec.dropout < 1.0)) {
    throw ParameterError("dropout must be in [0, 1)");
  }
  Rng rng = Rng::stream(seed, 0x1417);
  const std::size_t d = spec.input_dim, k = spec.num_classes;
  switch (spec.arch) {
    case Arch::kFnn: {
      FnnParams p;
      std::size_t in = d;
      std::vector<std::size_t> widths = spec.hidden;
      widths.push_back(k);
      for (std::size_t out : widths) {
        detail::require_positive(out, "layer width");
        p.weights.push_back(detail::glorot({in, out}, in, out, rng));
        p.biases.emplace_back(std::vector<std::size_t>{out});
        in = out;
      }
      return p;
    }
    case Arch::kCnn: {
      const std::size_t o = spec.conv_out, w = spec.window;
      const std::size_t h = spec.hidden.empty() ? 0 : spec.hidden.front();
      detail::require_positive(o, "conv output size");
      detail::require_positive(w, "window");
      detail::require_positive(h, "hidden size");
      CnnParams p;
      p.filter = detail::glorot({o, d, w}, d * w, o, rng);
      p.conv_bias = Tensor({o});
      p.fc_weight = detail::glorot({o, h}, o, h, rng);
      p.fc_bias = Tensor({h});
      p.out_weight = detail::glorot({h, k}, h, k, rng);
      p.out_bias = Tensor({k});
      p.dropout = spec.dropout;
      return p;
    }
    case Arch::kRnn: {
      const std::size_t h = spec.hidden.empty() ? 0 : spec.hidden.front();
      detail::require_positive(h, "hidden size");
      RnnParams p;
      p.input_weight = detail::glorot({d, h}, d, h, rng);
      p.recurrent_weight = detail::glorot({h, h}, h, h, rng);
      p.hidden_bias = Tensor({h});
      p.head_weight = detail::glorot({h, k}, h, k, rng);
      p.head_bias = Tensor({k});
      p.dropout = spec.dropout;
      return p;
    }
    case Arch::kLstm: {
      const std::size_t h = spec.hidden.empty() ? 0 : spec.hidden.front();
      detail::require_positive(h, "hidden size");
      LstmParams p;
      for (std::size_t g = 0; g < 4; ++g) {
        p.input_weight[g] = detail::glorot({d, h}, d, h, rng);
        p.recurrent_weight[g] = detail::glorot({h, h}, h, h, rng);
        p.bias[g] = Tensor({h}, g == kForgetGate ? 1.0 : 0.0);
      }
      p.head_weight = detail::glorot({h, k}, h, k, rng);
      p.head_bias = Tensor({k});
      p.dropout = spec.dropout;
      return p;
    }
  }
  throw ConfigError("unknown architecture");
}

using ModelTrace = std::variant<FnnTrace, CnnTrace, RnnTrace, LstmTrace>;

struct Forward {
  Tensor probs;
  ModelTrace trace;
};

/// Class distribution for one input. `train` enables dropout.
inline Forward forward(const ModelParams& params, const ModelInput& input, bool train, Rng& rng) {
  return std::visit(
      [&](const auto& p) -> Forward {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, FnnParams>) {
          if (!std::holds_alternative<SparseVector>(input)) {
            throw DimensionError("FNN expects a vector input");
          }
          auto tr = fnn_forward(p, std::get<SparseVector>(input));
          Tensor probs = tr.probs;
          return {std::move(probs), std::move(tr)};
        } else {
          if (!std::holds_alternative<SequenceInput>(input)) {
            throw DimensionError(std::string(arch_name(static_cast<Arch>(params.index()))) +
                                 " expects a sequence input");
          }
          const auto& x = std::get<SequenceInput>(input);
          ModelTrace tr;
          if constexpr (std::is_same_v<P, CnnParams>) {
            tr = cnn_forward(p, x, train, rng);
          } else if constexpr (std::is_same_v<P, RnnParams>) {
            tr = rnn_forward(p, x, train, rng);
          } else {
            tr = lstm_forward(p, x, train, rng);
          }
          Tensor probs = std::visit(
              [](const auto& t) -> Tensor {
                if constexpr (std::is_same_v<std::decay_t<decltype(t)>, FnnTrace>) {
                  return t.probs;
                } else {
                  return t.probs();
                }
              },
              tr);
          return {std::move(probs), std::move(tr)};
        }
      },
      params);
}

/// Accumulates scale * gradient of the cross-entropy loss into `grads`
/// (which must share the architecture of `params`).
inline void accumulate_backward(const ModelParams& params, const ModelTrace& trace,
                                std::size_t label, ModelParams& grads, double scale = 1.0,
                                Tensor* input_grad = nullptr) {
  if (params.index() != trace.index() || params.index() != grads.index()) {
    throw DimensionError("trace/gradient architecture does not match parameters");
  }
  if (label >= num_classes(params)) {
    throw ParameterError("label " + std::to_string(label) + " out of range");
  }
  switch (arch_of(params)) {
    case Arch::kFnn:
      fnn_backward(std::get<FnnParams>(params), std::get<FnnTrace>(trace), label,
                   std::get<FnnParams>(grads), scale);
      break;
    case Arch::kCnn:
      cnn_backward(std::get<CnnParams>(params), std::get<CnnTrace>(trace), label,
                   std::get<CnnParams>(grads), scale, input_grad);
      break;
    case Arch::kRnn:
      rnn_backward(std::get<RnnParams>(params), std::get<RnnTrace>(trace), label,
                   std::get<RnnParams>(grads), scale, input_grad);
      break;
    case Arch::kLstm:
      lstm_backward(std::get<LstmParams>(params), std::get<LstmTrace>(trace), label,
                    std::get<LstmParams>(grads), scale, input_grad);
      break;
  }
}

/// Gradient of -log p[label] with respect to every parameter.
inline ModelParams backward(const ModelParams& params, const ModelTrace& trace,
                            std::size_t label) {
  ModelParams grads = zeros_like(params);
  accumulate_backward(params, trace, label, grads);
  return grads;
}

/// Index of the largest probability; ties go to the smallest index.
inline std::size_t argmax(std::span<const double> probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

inline std::size_t predict(const ModelParams& params, const ModelInput& input) {
  Rng unused(0);
  return argmax(forward(params, input, false, unused).probs.data());
}

inline void validate(const ModelParams& params) {
  std::visit([](const auto& p) { p.validate(); }, params);
}

}  // namespace sentclf
