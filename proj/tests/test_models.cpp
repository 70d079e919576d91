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

#include "sentclf/checkpoint.hpp"
#include "sentclf/grad_check.hpp"
#include "sentclf/model.hpp"
#include "support.hpp"

namespace sentclf {
namespace {

void expect_near(const Tensor& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "at " << i;
}

Forward eval_forward(const ModelParams& p, const ModelInput& x) {
  Rng rng(0);
  return forward(p, x, false, rng);
}

// Hand-set instances; expected values come from an independent numpy trace.

FnnParams hand_fnn() {
  FnnParams p;
  p.weights = {Tensor::matrix({{0.1, -0.2, 0.3}, {0.4, 0.5, -0.6}}),
               Tensor::matrix({{0.7, -0.8}, {0.9, 0.1}, {-0.2, 0.3}})};
  p.biases = {Tensor::vector({0.01, 0.02, 0.03}), Tensor::vector({0.05, -0.05})};
  return p;
}

CnnParams hand_cnn() {
  CnnParams p;
  p.filter = Tensor({2, 2, 2}, std::vector<double>{1, -1, 0.5, 0.5, -1, 2, 1, 0});
  p.conv_bias = Tensor::vector({0.1, -0.2});
  p.fc_weight = Tensor::matrix({{0.3, -0.4}, {0.6, 0.2}});
  p.fc_bias = Tensor::vector({0.0, 0.1});
  p.out_weight = Tensor::matrix({{1, -1}, {0.5, 0.25}});
  p.out_bias = Tensor::vector({0, 0.1});
  return p;
}

RnnParams hand_rnn() {
  RnnParams p;
  p.input_weight = Tensor::matrix({{0.5, -0.3}, {0.2, 0.8}});
  p.recurrent_weight = Tensor::matrix({{0.1, 0.2}, {-0.3, 0.4}});
  p.hidden_bias = Tensor::vector({0.05, -0.1});
  p.head_weight = Tensor::matrix({{1, 0, -1}, {0.5, -0.5, 0.2}});
  p.head_bias = Tensor::vector({0, 0.1, -0.1});
  return p;
}

double lstm_value(int g, int a, int b) { return 0.1 * (((g * 7 + a * 3 + b * 5) % 11) - 5); }

LstmParams hand_lstm() {
  LstmParams p;
  for (int g = 0; g < 4; ++g) {
    p.input_weight[g] = Tensor({2, 2});
    p.recurrent_weight[g] = Tensor({2, 2});
    p.bias[g] = Tensor({2});
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        p.input_weight[g].at(a, b) = lstm_value(g, a, b);
        p.recurrent_weight[g].at(a, b) = lstm_value(g + 4, a, b);
      }
    }
    for (int c = 0; c < 2; ++c) p.bias[g][c] = 0.05 * (g + 1) * (c + 1) - 0.1;
  }
  p.head_weight = Tensor::matrix({{0.3, -0.3}, {0.7, 0.1}});
  p.head_bias = Tensor::vector({0.0, 0.05});
  return p;
}

TEST(Fnn, ZeroParametersGiveUniformOutput) {
  ArchSpec spec{Arch::kFnn, 5, 4, {3}, 1, 1, 0.0};
  ModelParams p = init_params(spec, 1);
  zero_fill(p);
  auto fwd = eval_forward(p, SparseVector::from_dense(Tensor::vector({1, 0, 2, 0, -1})));
  expect_near(std::get<FnnTrace>(fwd.trace).activations[0], {0.5, 0.5, 0.5}, 0);
  expect_near(fwd.probs, {0.25, 0.25, 0.25, 0.25}, 1e-15);
}

TEST(Fnn, HandTrace) {
  auto fwd = eval_forward(hand_fnn(), SparseVector::from_dense(Tensor::vector({1, 2})));
  expect_near(std::get<FnnTrace>(fwd.trace).activations[0],
              {0.7130001627522816, 0.6942363401080306, 0.295254302001909}, 1e-14);
  expect_near(fwd.probs, {0.8288164242594824, 0.17118357574051754}, 1e-14);
}

TEST(Fnn, DenseAndSparseInputsAgree) {
  FnnParams p = hand_fnn();
  Tensor x = Tensor::vector({0, -1.5});
  EXPECT_EQ(fnn_forward(p, x).probs, fnn_forward(p, SparseVector::from_dense(x)).probs);
  EXPECT_THROW(fnn_forward(p, Tensor::vector({1, 2, 3})), DimensionError);
}

TEST(Cnn, ZeroParametersGiveUniformOutput) {
  ArchSpec spec{Arch::kCnn, 3, 3, {4}, 5, 2, 0.1};
  ModelParams p = init_params(spec, 1);
  zero_fill(p);
  auto fwd = eval_forward(p, SequenceInput(Tensor({4, 3}, 1.0)));
  expect_near(fwd.probs, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-15);
}

TEST(Cnn, HandTraceChainsKernelOracles) {
  Tensor x = Tensor::matrix({{1, 0}, {0, 1}, {2, -1}, {1, 1}});
  auto fwd = eval_forward(hand_cnn(), SequenceInput(x));
  const auto& tr = std::get<CnnTrace>(fwd.trace);
  expect_near(tr.conv, {1.6, -1.2, -1.9, 4.8, 1.1, -1.2}, 1e-14);
  expect_near(tr.pool.pooled, {1.6, 4.8}, 1e-14);
  EXPECT_EQ(tr.pool.argmax, (std::vector<std::size_t>{0, 1}));
  expect_near(tr.fc, {3.36, 0.42}, 1e-14);
  expect_near(fwd.probs, {0.9988009189419755, 0.00119908105802444}, 1e-14);
}

TEST(Cnn, EvalModeIsDeterministic) {
  auto inst = testing::random_instance(Arch::kCnn, 3);
  std::get<CnnParams>(inst.params).dropout = 0.5;
  Rng a(1), b(2);
  EXPECT_EQ(forward(inst.params, inst.input, false, a).probs,
            forward(inst.params, inst.input, false, b).probs);
}

TEST(Cnn, OneHotRowsMatchDenseInput) {
  ArchSpec spec{Arch::kCnn, 32, 3, {4}, 6, 2, 0.0};
  ModelParams p = init_params(spec, 9);
  TokenSeq seq = pad_or_truncate(TokenSeq({"what", "is", "caffeine", "?"}), 6);
  OneHotRows rows = OneHotRows::from_tokens(seq, 32);
  auto sparse = eval_forward(p, SequenceInput(rows));
  auto dense = eval_forward(p, SequenceInput(rows.dense()));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(sparse.probs[i], dense.probs[i], 1e-14);
  ModelParams gs = backward(p, sparse.trace, 1), gd = backward(p, dense.trace, 1);
  auto fs = flatten(gs), fd = flatten(gd);
  for (std::size_t i = 0; i < fs.size(); ++i) EXPECT_NEAR(fs[i], fd[i], 1e-14);
}

TEST(Rnn, ZeroWeightsFixedPoint) {
  ArchSpec spec{Arch::kRnn, 2, 2, {3}, 1, 1, 0.0};
  ModelParams p = init_params(spec, 1);
  zero_fill(p);
  auto fwd = eval_forward(p, SequenceInput(Tensor::matrix({{1, 2}, {3, 4}})));
  for (double v : std::get<RnnTrace>(fwd.trace).hidden.data()) EXPECT_EQ(v, 0.5);
}

TEST(Rnn, SingleStep) {
  RnnParams p = hand_rnn();
  auto fwd = eval_forward(p, SequenceInput(Tensor::matrix({{1, 2}})));
  const auto& h = std::get<RnnTrace>(fwd.trace).hidden;
  EXPECT_NEAR(h[0], 0.7211151780228631, 1e-15);
  EXPECT_NEAR(h[1], 0.7685247834990175, 1e-15);
}

TEST(Rnn, HandTrace) {
  auto fwd = eval_forward(hand_rnn(), SequenceInput(Tensor::matrix({{1, 2}, {0, -1}, {0.5, 0.5}})));
  expect_near(std::get<RnnTrace>(fwd.trace).hidden,
              {0.7211151780228631, 0.7685247834990175, 0.4234941180934812, 0.3897490843780951,
               0.5806457179378185, 0.5964267574200085},
              1e-14);
  expect_near(fwd.probs, {0.6339277133164993, 0.2159101730606169, 0.1501621136228838}, 1e-14);
}

TEST(Lstm, ZeroParametersCollapse) {
  ArchSpec spec{Arch::kLstm, 2, 2, {3}, 1, 1, 0.0};
  ModelParams p = init_params(spec, 1);
  zero_fill(p);
  auto fwd = eval_forward(p, SequenceInput(Tensor::matrix({{1, 2}, {3, 4}, {5, 6}})));
  const auto& tr = std::get<LstmTrace>(fwd.trace);
  for (int g : {kInputGate, kForgetGate, kOutputGate}) {
    for (double v : tr.gates[g].data()) EXPECT_EQ(v, 0.5);
  }
  for (double v : tr.gates[kCandidate].data()) EXPECT_EQ(v, 0.0);
  for (double v : tr.cell.data()) EXPECT_EQ(v, 0.0);
  for (double v : tr.hidden.data()) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, SaturatedGatesCarryMemory) {
  // The input gate opens only for the first token and the forget gate stays
  // near 1, so the cell keeps its first value.
  ArchSpec spec{Arch::kLstm, 1, 2, {1}, 1, 1, 0.0};
  ModelParams mp = init_params(spec, 1);
  zero_fill(mp);
  auto& p = std::get<LstmParams>(mp);
  p.input_weight[kInputGate][0] = 60.0;
  p.bias[kInputGate][0] = -30.0;
  p.bias[kForgetGate][0] = 30.0;
  p.bias[kCandidate][0] = 0.5;
  auto fwd = eval_forward(mp, SequenceInput(Tensor::matrix({{1}, {0}, {0}, {0}, {0}})));
  const auto& cell = std::get<LstmTrace>(fwd.trace).cell;
  for (std::size_t t = 0; t < 5; ++t) EXPECT_NEAR(cell[t], std::tanh(0.5), 1e-9) << t;
}

TEST(Lstm, HandTrace) {
  auto fwd = eval_forward(hand_lstm(), SequenceInput(Tensor::matrix({{1.0, -0.5}, {0.25, 2.0}})));
  const auto& tr = std::get<LstmTrace>(fwd.trace);
  expect_near(tr.cell,
              {0.24730208265786333, 0.04610343968794416, 0.05364938334386765, 0.41090265942236437},
              1e-14);
  expect_near(tr.hidden,
              {0.10911164507932068, 0.0312903078692731, 0.02988227655912373, 0.12541160891739825},
              1e-14);
  expect_near(fwd.probs, {0.5107924062772248, 0.48920759372277517}, 1e-14);
}

TEST(Backward, PerfectPredictionHasZeroHeadGradient) {
  // A huge logit margin makes p[label] == 1 in double precision.
  ModelParams mp = hand_rnn();
  auto& p = std::get<RnnParams>(mp);
  p.head_bias = Tensor::vector({800, 0, 0});
  auto fwd = eval_forward(mp, SequenceInput(Tensor::matrix({{1, 2}})));
  ASSERT_EQ(fwd.probs[0], 1.0);
  ModelParams g = backward(mp, fwd.trace, 0);
  for (double v : flatten(g)) EXPECT_EQ(v, 0.0);
}

TEST(Backward, RejectsBadLabel) {
  auto inst = testing::random_instance(Arch::kLstm, 1);
  auto fwd = eval_forward(inst.params, inst.input);
  EXPECT_THROW(backward(inst.params, fwd.trace, 7), ParameterError);
}

class GradientCheck : public ::testing::TestWithParam<Arch> {};

TEST_P(GradientCheck, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = testing::random_instance(GetParam(), seed);
    auto r = grad_check(inst.params, inst.input, inst.label);
    EXPECT_LT(r.max_relative_error, 1e-4) << "seed " << seed << " coordinate " << r.worst_coordinate;
    EXPECT_EQ(r.coordinates_checked, parameter_count(inst.params));
  }
}

INSTANTIATE_TEST_SUITE_P(AllArchitectures, GradientCheck,
                         ::testing::Values(Arch::kFnn, Arch::kCnn, Arch::kRnn, Arch::kLstm),
                         [](const auto& info) { return std::string(arch_name(info.param)); });

TEST(GradientCheck, LinearSoftmaxIsNearExact) {
  ArchSpec spec{Arch::kFnn, 4, 3, {}, 1, 1, 0.0};
  ModelParams p = init_params(spec, 5);
  auto r = grad_check(p, SparseVector::from_dense(Tensor::vector({0.5, -1, 2, 0.25})), 2);
  EXPECT_LT(r.max_relative_error, 1e-8);
}

TEST(GradientCheck, DetectsCorruptedGradient) {
  auto inst = testing::random_instance(Arch::kRnn, 4);
  auto fwd = eval_forward(inst.params, inst.input);
  ModelParams analytic = backward(inst.params, fwd.trace, inst.label);
  auto flat = flatten(analytic);
  std::size_t c = 0;
  while (std::abs(flat[c]) < 1e-3) ++c;
  flat[c] *= 2.0;
  unflatten(flat, analytic);
  std::function<double(const ModelParams&)> loss = [&](const ModelParams& p) {
    return cross_entropy(eval_forward(p, inst.input).probs, inst.label);
  };
  auto r = grad_check(inst.params, loss, analytic);
  EXPECT_GT(r.max_relative_error, 1e-1);
  EXPECT_EQ(r.worst_coordinate, c);
}

TEST(GradientCheck, InputGradientOfSequenceModels) {
  for (Arch arch : {Arch::kCnn, Arch::kRnn, Arch::kLstm}) {
    auto inst = testing::random_instance(arch, 21);
    Tensor x = std::get<SequenceInput>(inst.input).dense();
    Rng rng(0);
    auto fwd = forward(inst.params, inst.input, false, rng);
    ModelParams grads = zeros_like(inst.params);
    Tensor dx = Tensor::zeros_like(x);
    accumulate_backward(inst.params, fwd.trace, inst.label, grads, 1.0, &dx);
    std::function<double(const Tensor&)> loss = [&](const Tensor& xi) {
      return cross_entropy(eval_forward(inst.params, SequenceInput(xi)).probs, inst.label);
    };
    EXPECT_LT(grad_check(x, loss, dx).max_relative_error, 1e-4) << arch_name(arch);
  }
}

TEST(Init, SameSeedSameParameters) {
  for (Arch arch : {Arch::kFnn, Arch::kCnn, Arch::kRnn, Arch::kLstm}) {
    ArchSpec spec{arch, 6, 3, {4}, 5, 2, 0.1};
    EXPECT_EQ(flatten(init_params(spec, 77)), flatten(init_params(spec, 77)));
    EXPECT_NE(flatten(init_params(spec, 77)), flatten(init_params(spec, 78)));
  }
}

TEST(Init, GlorotBoundsAndForgetBias) {
  ArchSpec spec{Arch::kLstm, 6, 3, {4}, 1, 1, 0.1};
  ModelParams mp = init_params(spec, 3);
  const auto& p = std::get<LstmParams>(mp);
  const double bound = std::sqrt(6.0 / 10.0);
  for (double v : p.input_weight[kInputGate].data()) EXPECT_LE(std::abs(v), bound);
  for (double v : p.bias[kForgetGate].data()) EXPECT_EQ(v, 1.0);
  for (double v : p.bias[kInputGate].data()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(init_params({Arch::kCnn, 3, 2, {}, 4, 2, 0.1}, 1), ParameterError);
  EXPECT_THROW(init_params({Arch::kRnn, 3, 2, {2}, 4, 2, 1.0}, 1), ParameterError);
}

TEST(Predict, TieRuleAndArgmax) {
  ArchSpec spec{Arch::kCnn, 2, 4, {3}, 2, 1, 0.0};
  ModelParams p = init_params(spec, 1);
  zero_fill(p);
  EXPECT_EQ(predict(p, SequenceInput(Tensor({3, 2}, 1.0))), 0u);
  std::vector<double> probs{0.1, 0.7, 0.2};
  EXPECT_EQ(argmax(probs), 1u);
}

TEST(Predict, InvariantToIncreasingLogitTransform) {
  // Adding a constant to every head bias shifts all logits equally.
  auto inst = testing::random_instance(Arch::kLstm, 12);
  const std::size_t before = predict(inst.params, inst.input);
  for (double& v : std::get<LstmParams>(inst.params).head_bias.data()) v += 5.0;
  EXPECT_EQ(predict(inst.params, inst.input), before);
}

TEST(Checkpoint, BitExactRoundTrip) {
  for (Arch arch : {Arch::kFnn, Arch::kCnn, Arch::kRnn, Arch::kLstm}) {
    auto inst = testing::random_instance(arch, 31);
    Checkpoint ckpt;
    ckpt.params = inst.params;
    ckpt.meta["note"] = "x=1";
    ckpt.lists["labels"] = {"A:b", "C:d"};
    ckpt.extra.emplace_back("rows", Tensor::matrix({{0.1, 1e-300}, {-0.0, 3}}));
    const std::string bytes = serialize_checkpoint(ckpt);
    Checkpoint back = deserialize_checkpoint(bytes);
    EXPECT_EQ(arch_of(back.params), arch);
    EXPECT_EQ(flatten(back.params), flatten(inst.params));
    EXPECT_EQ(back.lists, ckpt.lists);
    EXPECT_EQ(back.meta.at("note"), "x=1");
    ASSERT_EQ(back.extra.size(), 1u);
    EXPECT_EQ(back.extra[0].second, ckpt.extra[0].second);
    EXPECT_EQ(serialize_checkpoint(back), bytes);
  }
}

TEST(Checkpoint, RejectsCorruptInput) {
  auto inst = testing::random_instance(Arch::kCnn, 2);
  Checkpoint ckpt;
  ckpt.params = inst.params;
  std::string bytes = serialize_checkpoint(ckpt);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)), DataError);
  bytes[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bytes), DataError);
}

}  // namespace
}  // namespace sentclf
