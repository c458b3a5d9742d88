#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sgn/error.hpp"
#include "sgn/numerics/adam.hpp"
#include "sgn/numerics/batch_norm.hpp"
#include "sgn/numerics/grad_check.hpp"
#include "sgn/numerics/ops.hpp"

using namespace sgn;
using sgn::test::make;
using sgn::test::random_tensor;
using sgn::test::to_vec;

TEST(Affine, ZeroMapGivesZeros) {
  auto x = random_tensor<double>({4, 3}, 1);
  auto y = affine(x, Tensor<double>::zeros({2, 3}), Tensor<double>::zeros({2}));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Affine, IdentityWeight) {
  auto y = affine(make<double>({1, 3}, {1, 2, 3}), make<double>({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
  EXPECT_EQ(to_vec(y), (std::vector<double>{1, 2, 3}));
}

TEST(Affine, HandMatrixMatchesScalarLoop) {
  auto w = make<double>({2, 2}, {1, 1, 0, 1});
  auto b = make<double>({2}, {1, 0});
  auto y = affine(make<double>({1, 2}, {2, 3}), w, b);
  EXPECT_EQ(to_vec(y), (std::vector<double>{6, 3}));

  auto x = random_tensor<double>({3, 4, 5}, 2);
  auto w2 = random_tensor<double>({6, 5}, 3);
  auto b2 = random_tensor<double>({6}, 4);
  auto out = affine(x, w2, b2);
  ASSERT_EQ(out.shape(), (Shape{3, 4, 6}));
  for (std::size_t r = 0; r < 12; ++r) {
    for (std::size_t o = 0; o < 6; ++o) {
      double acc = b2.values()[o];
      for (std::size_t i = 0; i < 5; ++i) acc += x.values()[r * 5 + i] * w2.values()[o * 5 + i];
      EXPECT_NEAR(out.values()[r * 6 + o], acc, 1e-12);
    }
  }
}

TEST(Affine, ShapeMismatchNamesBothShapes) {
  try {
    affine(Tensor<double>::zeros({2, 3}), Tensor<double>::zeros({4, 5}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[4, 5]"), std::string::npos) << msg;
  }
}

TEST(BatchNorm, UnitVarianceInputIsFixedPoint) {
  BatchNorm<double> bn(2);
  auto y = bn.forward(make<double>({2, 2}, {-1, -1, 1, 1}));
  EXPECT_NEAR(y.values()[0], -1.0, 1e-5);
  EXPECT_NEAR(y.values()[3], 1.0, 1e-5);
}

TEST(BatchNorm, ZeroGammaGivesBeta) {
  BatchNorm<double> bn(3);
  std::fill(bn.gamma().mutable_values().begin(), bn.gamma().mutable_values().end(), 0.0);
  bn.beta().mutable_values()[1] = 0.7;
  auto y = bn.forward(random_tensor<double>({5, 3}, 9));
  for (std::size_t r = 0; r < 5; ++r) EXPECT_DOUBLE_EQ(y.values()[r * 3 + 1], 0.7);
}

TEST(BatchNorm, EvalModeClosedForm) {
  BatchNorm<double> bn(1);
  bn.set_mode(Mode::eval);
  bn.running_mean().mutable_values()[0] = 2.0;
  bn.running_var().mutable_values()[0] = 1.0;
  auto y = bn.forward(make<double>({1, 1}, {3.0}));
  EXPECT_NEAR(y.item(), 1.0 / std::sqrt(1.0 + 1e-5), 1e-12);
}

TEST(BatchNorm, SingleSampleInTrainModeIsConfigError) {
  BatchNorm<double> bn(2);
  EXPECT_THROW(bn.forward(Tensor<double>::zeros({1, 2})), ConfigError);
}

TEST(BatchNorm, RunningStatisticsUpdate) {
  BatchNorm<double> bn(1, 0.1, 1e-5);
  bn.forward(make<double>({4, 1}, {1, 2, 3, 4}));
  EXPECT_NEAR(bn.running_mean().values()[0], 0.1 * 2.5, 1e-12);
  EXPECT_GE(bn.running_var().values()[0], 0.0);
}

TEST(Softmax, Examples) {
  auto a = softmax_rows(make<double>({1, 2}, {0, 0}));
  EXPECT_DOUBLE_EQ(a.values()[0], 0.5);
  auto b = softmax_rows(make<double>({1, 2}, {0, std::log(3.0)}));
  EXPECT_NEAR(b.values()[0], 0.25, 1e-15);
  EXPECT_NEAR(b.values()[1], 0.75, 1e-15);
}

TEST(Softmax, RowsSumToOneAndArePositive) {
  auto s = softmax_rows(random_tensor<double>({40, 17}, 5, 10.0));
  for (std::size_t r = 0; r < 40; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < 17; ++c) {
      EXPECT_GT(s.values()[r * 17 + c], 0.0);
      acc += s.values()[r * 17 + c];
    }
    EXPECT_NEAR(acc, 1.0, 1e-9);
  }
}

TEST(Relu, ClampsNegatives) {
  EXPECT_EQ(to_vec(relu(make<double>({3}, {-2, 0, 5}))), (std::vector<double>{0, 0, 5}));
}

TEST(TemporalConv, PointwiseIdentity) {
  auto x = random_tensor<double>({2, 5, 3}, 6);
  std::vector<double> w(9, 0.0);
  for (int c = 0; c < 3; ++c) w[c * 3 + c] = 1.0;
  EXPECT_EQ(to_vec(temporal_conv(x, make<double>({3, 3, 1}, w))), to_vec(x));
}

TEST(TemporalConv, DeltaKernelIdentity) {
  auto x = random_tensor<double>({2, 7, 2}, 7);
  std::vector<double> w(12, 0.0);
  for (int c = 0; c < 2; ++c) w[(c * 2 + c) * 3 + 1] = 1.0;
  EXPECT_EQ(to_vec(temporal_conv(x, make<double>({2, 2, 3}, w))), to_vec(x));
}

TEST(TemporalConv, HandConvolutionWithZeroPadding) {
  auto y = temporal_conv(make<double>({1, 3, 1}, {1, 2, 3}), make<double>({1, 1, 3}, {1, 1, 1}));
  EXPECT_EQ(to_vec(y), (std::vector<double>{3, 6, 5}));
}

TEST(TemporalConv, EvenKernelIsConfigError) {
  EXPECT_THROW(temporal_conv(Tensor<double>::zeros({1, 3, 1}), Tensor<double>::zeros({1, 1, 2})), ConfigError);
}

TEST(MaxPool, Examples) {
  auto single = random_tensor<double>({2, 1, 3}, 8);
  EXPECT_EQ(to_vec(max_pool(single, 1).output), to_vec(single));

  auto p = max_pool(make<double>({2, 2}, {1, 4, 3, 2}), 0);
  EXPECT_EQ(to_vec(p.output), (std::vector<double>{3, 4}));
  EXPECT_EQ(p.argmax, (std::vector<std::size_t>{1, 0}));

  auto tie = max_pool(make<double>({2}, {2, 2}), 0);
  EXPECT_EQ(tie.output.item(), 2.0);
  EXPECT_EQ(tie.argmax[0], 0u);
}

TEST(MaxPool, BackwardConservesMassAtArgmax) {
  auto x = random_tensor<double>({3, 6, 4}, 10, 1.0, true);
  auto pooled = max_pool(x, 1);
  auto upstream = random_tensor<double>({3, 1, 4}, 11);
  // d/dx of sum(pooled * upstream), via a fixed affine contraction
  auto flat = reshape(pooled.output, {1, 12});
  auto loss = affine(flat, reshape(upstream, {1, 12}));
  loss.backward();
  double in_mass = 0.0, out_mass = std::accumulate(upstream.values().begin(), upstream.values().end(), 0.0);
  for (std::size_t i = 0; i < x.numel(); ++i) in_mass += x.grad()[i];
  EXPECT_NEAR(in_mass, out_mass, 1e-12);
  for (std::size_t n = 0; n < 3; ++n) {
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t t = 0; t < 6; ++t) {
        const double g = x.grad()[(n * 6 + t) * 4 + c];
        if (t != pooled.argmax[n * 4 + c]) EXPECT_EQ(g, 0.0);
      }
    }
  }
}

TEST(CrossEntropy, UniformLogitsGiveLogK) {
  const std::vector<int> labels{3, 77};
  for (double eps : {0.0, 0.1, 0.5}) {
    auto loss = cross_entropy_label_smoothed(Tensor<double>::full({2, 120}, 1.5), labels, eps);
    EXPECT_NEAR(loss.item(), std::log(120.0), 1e-12);
  }
}

TEST(CrossEntropy, ConfidentCorrectPredictionApproachesZero) {
  const std::vector<int> labels{1};
  auto loss = cross_entropy_label_smoothed(make<double>({1, 3}, {0, 60, 0}), labels, 0.0);
  EXPECT_LT(loss.item(), 1e-20);
}

TEST(CrossEntropy, TwoClassClosedForm) {
  const std::vector<int> labels{1};
  auto loss = cross_entropy_label_smoothed(make<double>({1, 2}, {0, std::log(3.0)}), labels, 0.1);
  const double expected = -(0.05 * std::log(0.25) + 0.95 * std::log(0.75));
  EXPECT_NEAR(loss.item(), expected, 1e-14);
  EXPECT_NEAR(loss.item(), 0.3426, 1e-4);
}

TEST(CrossEntropy, LabelOutOfRangeIsDataError) {
  const std::vector<int> labels{5};
  EXPECT_THROW(cross_entropy_label_smoothed(Tensor<double>::zeros({1, 3}), labels, 0.1), DataError);
}

TEST(Adam, ZeroGradientIsNoOp) {
  auto p = random_tensor<double>({4}, 12, 1.0, true);
  const auto before = to_vec(p);
  p.zero_grad();
  AdamState<double> st;
  std::vector<Tensor<double>> ps{p};
  adam_step<double>(ps, st);
  EXPECT_EQ(to_vec(p), before);
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto p = make<double>({1}, {1.0}, true);
  p.mutable_grad()[0] = 2.0;
  AdamState<double> st;
  std::vector<Tensor<double>> ps{p};
  adam_step<double>(ps, st);
  EXPECT_NEAR(p.values()[0], 1.0 - 0.001, 1e-10);
}

TEST(Adam, ConstantGradientKeepsStepAtLearningRate) {
  auto p = make<double>({1}, {0.0}, true);
  AdamState<double> st;
  std::vector<Tensor<double>> ps{p};
  double prev = 0.0;
  for (int i = 0; i < 2; ++i) {
    p.mutable_grad()[0] = 0.5;
    adam_step<double>(ps, st);
    EXPECT_NEAR(prev - p.values()[0], 0.001, 1e-9);
    prev = p.values()[0];
  }
  EXPECT_EQ(st.step, 2);
}

TEST(Adam, CoupledWeightDecayAddsToGradient) {
  auto p = make<double>({1}, {2.0}, true);
  p.zero_grad();
  AdamState<double> st;
  st.weight_decay = 0.1;
  std::vector<Tensor<double>> ps{p};
  adam_step<double>(ps, st);
  EXPECT_NEAR(p.values()[0], 2.0 - 0.001, 1e-9);
}

TEST(GradCheck, SquareFunction) {
  auto theta = make<double>({1}, {3.0}, true);
  std::vector<NamedTensor<double>> params{{"theta", theta}};
  auto loss = [&] { return affine(reshape(theta, {1, 1}), reshape(theta, {1, 1})); };
  auto rep = grad_check([&] { return reshape(loss(), {1}); }, params);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_NEAR(rep.entries[0].analytic_at_worst, 6.0, 1e-12);
  EXPECT_NEAR(rep.entries[0].numeric_at_worst, 6.0, 1e-8);
  EXPECT_TRUE(rep.passed);
}

TEST(GradCheck, AffineReluSumAwayFromKinks) {
  auto x = random_tensor<double>({5, 4}, 13, 1.0, true);
  auto w = random_tensor<double>({3, 4}, 14, 1.0, true);
  auto b = make<double>({3}, {5.0, 5.0, 5.0}, true);  // keeps every pre-activation positive
  std::vector<NamedTensor<double>> params{{"x", x}, {"w", w}, {"b", b}};
  auto rep = grad_check([&] { return sum(relu(affine(x, w, b))); }, params);
  EXPECT_LT(rep.max_rel_error, 1e-6);
}

TEST(GradCheck, FrozenTensorsAreExcluded) {
  auto a = random_tensor<double>({3}, 15, 1.0, true);
  auto frozen = random_tensor<double>({3}, 16, 1.0, false);
  std::vector<NamedTensor<double>> params{{"a", a}, {"frozen", frozen, false}};
  auto rep = grad_check([&] { return sum(add(a, frozen)); }, params);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_EQ(rep.entries[0].name, "a");
}

TEST(GradCheck, DetectsAWrongBackward) {
  auto x = random_tensor<double>({4}, 17, 1.0, true);
  std::vector<NamedTensor<double>> params{{"x", x}};
  auto scaled_wrong = [&] {
    std::vector<double> v(x.values().begin(), x.values().end());
    auto xn = x.node_ptr();
    auto y = Tensor<double>::make_result(x.shape(), v, {x}, [xn](const Tensor<double>::Node& self) {
      auto& g = xn->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += 3 * self.grad[i];
    });
    return sum(y);
  };
  EXPECT_FALSE(grad_check(scaled_wrong, params).passed);
}

TEST(Tensor, ShapeMustMatchValues) {
  EXPECT_THROW(Tensor<double>({2, 2}, std::vector<double>(3)), DimensionError);
}

TEST(Tensor, NoGradGuardSkipsGraph) {
  auto a = random_tensor<double>({3}, 18, 1.0, true);
  {
    NoGradGuard guard;
    EXPECT_FALSE(add(a, a).requires_grad());
  }
  EXPECT_TRUE(add(a, a).requires_grad());
}
