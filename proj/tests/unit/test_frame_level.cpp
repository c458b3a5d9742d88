#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sgn/error.hpp"
#include "sgn/model/frame_level.hpp"
#include "sgn/numerics/grad_check.hpp"
#include "sgn/numerics/ops.hpp"

using namespace sgn;
using sgn::test::make;
using sgn::test::random_tensor;

namespace {

FrameHeadConfig small(std::size_t frames, std::size_t kernel = 3) {
  FrameHeadConfig c;
  c.frames = frames;
  c.c3 = 4;
  c.c4 = 5;
  c.classes = 3;
  c.temporal_kernel = kernel;
  c.frame_hidden = 3;
  return c;
}

template <typename T>
void fill(Tensor<T>& t, T v) {
  std::fill(t.mutable_values().begin(), t.mutable_values().end(), v);
}

}  // namespace

TEST(FrameSemantics, ZeroEmbedderIsIdentityAndFeaturesZeroGiveEmbedding) {
  std::mt19937_64 rng(1);
  EmbedMLP<double> e(6, 3, 4, rng);
  auto f = FrameLevelHead<double>::frame_semantics(e, 6);
  ASSERT_EQ(f.shape(), (Shape{6, 4}));
  // rows differ by frame, identical input index gives identical row
  EXPECT_EQ(sgn::test::to_vec(f), sgn::test::to_vec(FrameLevelHead<double>::frame_semantics(e, 6)));
  EXPECT_THROW(FrameLevelHead<double>::frame_semantics(e, 7), ConfigError);
}

TEST(SpatialPool, MatchesBruteForce) {
  auto x = random_tensor<double>({2, 3, 3, 4}, 2);
  auto p = max_pool(x, 2);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      double best = -1e300;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        const double v = x.values()[(r * 3 + j) * 4 + c];
        if (v > best) best = v, arg = j;
      }
      EXPECT_EQ(p.output.values()[r * 4 + c], best);
      EXPECT_EQ(p.argmax[r * 4 + c], arg);
    }
  }
}

TEST(SpatialPool, DominantJointFillsArgmax) {
  auto x = random_tensor<double>({1, 4, 5, 6}, 3, 0.1);
  auto v = x.mutable_values();
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t c = 0; c < 6; ++c) v[(t * 5 + 2) * 6 + c] = 10.0;
  }
  auto probe = smp_probe(max_pool(x, 2).argmax, 5);
  EXPECT_EQ(probe.counts[2], 24u);
  EXPECT_EQ(probe.total(), 24u);
}

TEST(SmpProbe, CountsAndTopFive) {
  const std::vector<std::size_t> alternating{0, 1, 0, 1, 0, 1, 1, 1};
  auto p = smp_probe(alternating, 2);
  EXPECT_EQ(p.counts, (std::vector<std::size_t>{3, 5}));
  EXPECT_EQ(p.top5, (std::vector<std::size_t>{1, 0}));
  auto ties = smp_probe(std::vector<std::size_t>{4, 2, 6, 0, 1, 3, 5}, 7);
  EXPECT_EQ(ties.top5, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_THROW(smp_probe(std::vector<std::size_t>{7}, 7), DimensionError);
}

TEST(FrameHead, SingleFrameIsWellDefined) {
  std::mt19937_64 rng(4);
  FrameLevelHead<double> head(small(1), rng);
  auto out = head.forward(random_tensor<double>({2, 1, 3, 4}, 5), nullptr);
  EXPECT_EQ(out.logits.shape(), (Shape{2, 3}));
  EXPECT_EQ(out.smp_argmax.size(), 2u * 1 * 4);
}

TEST(FrameHead, FrameCountMismatchIsConfigError) {
  std::mt19937_64 rng(6);
  FrameLevelHead<double> head(small(5), rng);
  EXPECT_THROW(head.forward(random_tensor<double>({2, 4, 3, 4}, 7), nullptr), ConfigError);
}

TEST(FrameHead, ZeroClassifierGivesBias) {
  std::mt19937_64 rng(8);
  FrameLevelHead<double> head(small(5), rng);
  fill(head.classifier().weight(), 0.0);
  auto out = head.forward(random_tensor<double>({2, 5, 3, 4}, 9), nullptr);
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(out.logits.values()[n * 3 + k], head.classifier().bias().values()[k]);
  }
}

TEST(FrameHead, FramePermutationInvariantWithoutIndexAndKernelOne) {
  std::mt19937_64 rng(10);
  auto cfg = small(6, 1);
  cfg.own_frame_index = false;
  FrameLevelHead<double> head(cfg, rng);
  head.set_mode(Mode::eval);
  auto x = random_tensor<double>({2, 6, 3, 4}, 11);
  const std::vector<std::size_t> perm{4, 2, 0, 5, 1, 3};
  std::vector<double> px(x.numel());
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t t = 0; t < 6; ++t) {
      std::copy_n(x.values().begin() + (n * 6 + perm[t]) * 12, 12, px.begin() + (n * 6 + t) * 12);
    }
  }
  auto a = head.forward(x, nullptr).logits;
  auto b = head.forward(make<double>(x.shape(), px), nullptr).logits;
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
}

TEST(FrameHead, GradientCheck) {
  std::mt19937_64 rng(12);
  FrameLevelHead<double> head(small(4), rng);
  auto x = random_tensor<double>({3, 4, 3, 4}, 13, 1.0, true);
  std::vector<NamedTensor<double>> params{{"x", x}};
  head.collect(params, "head");
  const std::vector<int> labels{0, 2, 1};
  GradCheckOptions opt;
  opt.skip_kinks = true;
  auto rep = grad_check([&] { return cross_entropy_label_smoothed(head.forward(x, nullptr).logits, labels, 0.1); },
                        params, opt);
  for (const auto& e : rep.entries) {
    // biases feeding straight into train-mode BN have a structurally zero gradient
    if (e.name == "head.tconv.bias" || e.name == "head.pointwise.bias") {
      EXPECT_LT(std::abs(e.analytic_at_worst), 1e-12) << e.name;
      continue;
    }
    EXPECT_LT(e.max_rel_error, 1e-4) << e.name;
  }
}
