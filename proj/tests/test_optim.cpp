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


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sentclf/model.hpp"
#include "sentclf/optim.hpp"
#include "support.hpp"

namespace sentclf {
namespace {

TEST(CrossEntropy, ReferenceValues) {
  EXPECT_EQ(cross_entropy(Tensor::vector({0, 1, 0}), 1), 0.0);
  EXPECT_NEAR(cross_entropy(Tensor::vector({0.25, 0.25, 0.25, 0.25}), 2), 1.3862943611198906188,
              1e-15);
  EXPECT_NEAR(cross_entropy(Tensor::vector({0.2, 0.8}), 0), 1.6094379124341003746, 1e-15);
}

TEST(CrossEntropy, ClampAndErrors) {
  EXPECT_NEAR(cross_entropy(Tensor::vector({0, 1}), 0), -std::log(1e-15), 1e-9);
  EXPECT_THROW(cross_entropy(Tensor::vector({0.5, 0.5}), 2), ParameterError);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    Tensor p = softmax(Tensor::vector({rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}));
    EXPECT_GE(cross_entropy(p, rng.below(3)), 0.0);
  }
}

TEST(Sgd, HandTrace) {
  Tensor p = Tensor::vector({1.0, -2.0, 0.5});
  sgd_step(p, Tensor::vector({2.0, 0.5, -1.0}), 0.1);
  EXPECT_NEAR(p[0], 0.8, 1e-15);
  EXPECT_NEAR(p[1], -2.05, 1e-15);
  EXPECT_NEAR(p[2], 0.6, 1e-15);
  Tensor q = Tensor::vector({3.0});
  sgd_step(q, Tensor::vector({9.0}), 0.0);
  EXPECT_EQ(q[0], 3.0);
  EXPECT_THROW(sgd_step(q, Tensor::vector({1, 2}), 0.1), DimensionError);
}

TEST(Adagrad, FirstStepIsSignTimesRate) {
  AdagradState st;
  Tensor p = Tensor::vector({0.0, 0.0});
  adagrad_step(st, p, Tensor::vector({3.0, -0.02}));
  EXPECT_NEAR(p[0], -0.01, 1e-9);
  EXPECT_NEAR(p[1], 0.01, 1e-6);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adagrad, ZeroGradientIsAFixedPoint) {
  AdagradState st;
  Tensor p = Tensor::vector({1.0, 2.0});
  adagrad_step(st, p, Tensor::vector({0.5, 0.0}));
  const double acc1 = st.accumulators[0][1];
  adagrad_step(st, p, Tensor::vector({0.0, 0.0}));
  EXPECT_EQ(p[1], 2.0);
  EXPECT_EQ(st.accumulators[0][1], acc1);
}

TEST(Adagrad, TwoStepHandTrace) {
  // p=1, g=0.5 then g=-0.25, lr=0.01, decay=0.001: computed independently.
  AdagradState st;
  Tensor p = Tensor::vector({1.0});
  adagrad_step(st, p, Tensor::vector({0.5}));
  adagrad_step(st, p, Tensor::vector({-0.25}));
  EXPECT_NEAR(p[0], 0.9944676684152302, 1e-15);
  EXPECT_NEAR(st.accumulators[0][0], 0.3125, 1e-15);
  EXPECT_NEAR(st.effective_rate(), 0.01 / 1.002, 1e-18);
}

TEST(Adagrad, StepsShrinkUnderConstantGradient) {
  AdagradState st;
  Tensor p = Tensor::vector({0.0});
  double prev_step = 1e9, prev_acc = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double before = p[0];
    adagrad_step(st, p, Tensor::vector({0.7}));
    const double step = std::abs(p[0] - before);
    EXPECT_LE(step, prev_step);
    EXPECT_LE(step, st.learning_rate / std::sqrt(st.epsilon) * 0.7);
    EXPECT_GE(st.accumulators[0][0], prev_acc);
    prev_step = step;
    prev_acc = st.accumulators[0][0];
  }
}

TEST(Adagrad, DeterministicAndShapeChecked) {
  auto inst = testing::random_instance(Arch::kCnn, 5);
  ModelParams a = inst.params, b = inst.params;
  Rng rng(0);
  ModelParams g = backward(a, forward(a, inst.input, false, rng).trace, inst.label);
  AdagradState sa, sb;
  adagrad_step(sa, a, g);
  adagrad_step(sb, b, g);
  EXPECT_EQ(flatten(a), flatten(b));
  Tensor t = Tensor::vector({1.0});
  EXPECT_THROW(adagrad_step(sa, t, Tensor::vector({1.0})), DimensionError);
}

TEST(Lbfgs, QuadraticConvergesExactly) {
  const std::vector<double> c{3.0, -1.0, 0.5, 2.0};
  Objective f = [&](std::span<const double> x, std::span<double> g) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      v += (x[i] - c[i]) * (x[i] - c[i]);
      g[i] = 2.0 * (x[i] - c[i]);
    }
    return v;
  };
  LbfgsOptions opt;
  opt.tolerance = 1e-10;
  auto r = lbfgs_minimize(f, {10.0, 10.0, -7.0, 0.0}, opt);
  EXPECT_EQ(r.status, LbfgsStatus::kConverged);
  EXPECT_LE(r.iterations, 10);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(r.x[i], c[i], 1e-8);
}

TEST(Lbfgs, StartAtMinimizer) {
  Objective f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * x[0];
    return x[0] * x[0];
  };
  auto r = lbfgs_minimize(f, {0.0});
  EXPECT_EQ(r.status, LbfgsStatus::kConverged);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Lbfgs, Rosenbrock) {
  Objective f = [](std::span<const double> x, std::span<double> g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  LbfgsOptions opt;
  opt.max_iter = 100;
  opt.tolerance = 1e-9;
  auto r = lbfgs_minimize(f, {-1.2, 1.0}, opt);
  EXPECT_LT(r.value, 1e-6);
  EXPECT_LE(r.iterations, 100);
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x[1], 1.0, 2e-3);
}

TEST(Lbfgs, EveryAcceptedStepDecreases) {
  auto m = testing::memorize_with_lbfgs(3);
  EXPECT_TRUE(m.loss_monotone);
  EXPECT_LT(m.result.value, 1e-3);
}

TEST(Lbfgs, LineSearchFailureIsAStatus) {
  // The reported gradient points uphill, so no step can satisfy Armijo.
  Objective f = [](std::span<const double> x, std::span<double> g) {
    g[0] = -2.0 * x[0];
    return x[0] * x[0];
  };
  auto r = lbfgs_minimize(f, {1.0});
  EXPECT_EQ(r.status, LbfgsStatus::kLineSearchFailed);
  EXPECT_EQ(r.x[0], 1.0);
}

TEST(Lbfgs, HistoryRejectsNonPositiveCurvature) {
  LbfgsHistory h(2);
  EXPECT_FALSE(h.push({1.0, 0.0}, {-1.0, 0.0}));
  EXPECT_TRUE(h.push({1.0, 0.0}, {2.0, 0.0}));
  EXPECT_TRUE(h.push({0.0, 1.0}, {0.0, 3.0}));
  EXPECT_TRUE(h.push({1.0, 1.0}, {1.0, 1.0}));
  EXPECT_EQ(h.size(), 2u);
  EXPECT_THROW(LbfgsHistory(0), ParameterError);
}

TEST(Lbfgs, CallbackCanStop) {
  Objective f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * (x[0] - 5.0);
    return (x[0] - 5.0) * (x[0] - 5.0);
  };
  int calls = 0;
  auto r = lbfgs_minimize(f, {0.0}, {}, [&](int, std::span<const double>, double) {
    return ++calls < 1;
  });
  EXPECT_EQ(r.status, LbfgsStatus::kStopped);
  EXPECT_EQ(calls, 1);
}

}  // namespace
}  // namespace sentclf
