#include <numeric>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sgn/model/joint_graph.hpp"
#include "sgn/numerics/grad_check.hpp"
#include "sgn/numerics/ops.hpp"

using namespace sgn;
using sgn::test::make;
using sgn::test::random_tensor;

namespace {

template <typename T>
void fill(Tensor<T>& t, T v) {
  std::fill(t.mutable_values().begin(), t.mutable_values().end(), v);
}

JointGraphConfig small(std::size_t joints = 4) {
  JointGraphConfig c;
  c.joints = joints;
  c.c1 = 3;
  c.c2 = 5;
  c.gcn_dims = {4, 6, 6};
  return c;
}

std::vector<int> identity_types(std::size_t j) {
  std::vector<int> v(j);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(JointSemantics, ConcatLayout) {
  std::mt19937_64 rng(1);
  JointLevelModule<double> jl(small(), rng);
  auto types = identity_types(4);
  auto sem = jl.joint_semantics(types);
  ASSERT_EQ(sem.shape(), (Shape{4, 3}));
  auto z = random_tensor<double>({2, 3, 4, 3}, 2);
  auto c = jl.concat_semantics(z, sem);
  ASSERT_EQ(c.shape(), (Shape{2, 3, 4, 6}));
  for (std::size_t r = 0; r < 2 * 3; ++r) {
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t ch = 0; ch < 3; ++ch) {
        EXPECT_EQ(c.values()[(r * 4 + k) * 6 + ch], z.values()[(r * 4 + k) * 3 + ch]);
        EXPECT_EQ(c.values()[(r * 4 + k) * 6 + 3 + ch], sem.values()[k * 3 + ch]);
      }
    }
  }
}

TEST(JointSemantics, ZeroEmbedderGivesZeroTail) {
  std::mt19937_64 rng(2);
  JointLevelModule<double> jl(small(), rng);
  fill(jl.joint_embedder().second().weight(), 0.0);
  fill(jl.joint_embedder().second().bias(), 0.0);
  auto sem = jl.joint_semantics(identity_types(4));
  for (double v : sem.values()) EXPECT_EQ(v, 0.0);
}

TEST(Adjacency, ZeroThetaIsUniform) {
  std::mt19937_64 rng(3);
  auto cfg = small(25);
  JointLevelModule<double> jl(cfg, rng);
  fill(jl.theta().weight(), 0.0);
  fill(jl.theta().bias(), 0.0);
  auto g = jl.build_adjacency(random_tensor<double>({1, 2, 25, 6}, 4));
  for (double v : g.values()) EXPECT_NEAR(v, 0.04, 1e-15);
}

TEST(Adjacency, IdenticalJointsGiveUniformRows) {
  std::mt19937_64 rng(4);
  JointLevelModule<double> jl(small(), rng);
  std::vector<double> row{0.3, -0.2, 0.9, 0.1, 0.0, 1.2};
  std::vector<double> v;
  for (int k = 0; k < 4; ++k) v.insert(v.end(), row.begin(), row.end());
  auto g = jl.build_adjacency(make<double>({1, 1, 4, 6}, v));
  for (double x : g.values()) EXPECT_NEAR(x, 0.25, 1e-15);
}

TEST(Adjacency, TwoJointScalarOracle) {
  JointGraphConfig cfg;
  cfg.joints = 2;
  cfg.c1 = 1;  // graph input width 2
  cfg.c2 = 1;
  cfg.gcn_dims = {2};
  std::mt19937_64 rng(5);
  JointLevelModule<double> jl(cfg, rng);
  // theta picks the first input channel, phi the second
  std::vector<double> wt{1, 0}, wp{0, 1};
  std::copy(wt.begin(), wt.end(), jl.theta().weight().mutable_values().begin());
  std::copy(wp.begin(), wp.end(), jl.phi().weight().mutable_values().begin());
  fill(jl.theta().bias(), 0.0);
  fill(jl.phi().bias(), 0.0);
  const double z[2][2] = {{1.0, 2.0}, {-0.5, 3.0}};
  auto g = jl.build_adjacency(make<double>({1, 1, 2, 2}, {z[0][0], z[0][1], z[1][0], z[1][1]}));
  for (int i = 0; i < 2; ++i) {
    const double s0 = z[i][0] * z[0][1], s1 = z[i][0] * z[1][1];
    const double e0 = std::exp(s0), e1 = std::exp(s1);
    EXPECT_NEAR(g.values()[i * 2 + 0], e0 / (e0 + e1), 1e-15);
    EXPECT_NEAR(g.values()[i * 2 + 1], e1 / (e0 + e1), 1e-15);
  }
}

TEST(GraphConv, UniformGraphOnEqualRows) {
  std::mt19937_64 rng(6);
  GraphConvLayer<double> layer(3, 2, 0.1, 1e-5, rng);
  layer.norm().set_mode(Mode::eval);  // running mean 0, var 1: near identity
  std::vector<double> z;
  for (int k = 0; k < 4; ++k) z.insert(z.end(), {0.5, -1.0, 2.0});
  auto out = layer.forward(make<double>({1, 1, 4, 3}, z), Tensor<double>::full({1, 1, 4, 4}, 0.25));
  const auto& wy = layer.transform().weight();
  const auto& wz = layer.residual().weight();
  for (std::size_t o = 0; o < 2; ++o) {
    double pre = 0.0;
    for (std::size_t i = 0; i < 3; ++i) pre += z[i] * (wy.values()[o * 3 + i] + wz.values()[o * 3 + i]);
    const double expected = std::max(0.0, pre / std::sqrt(1.0 + 1e-5));
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(out.values()[k * 2 + o], expected, 1e-12);
  }
}

TEST(GraphConv, ZeroTransformIsPureResidual) {
  std::mt19937_64 rng(7);
  GraphConvLayer<double> layer(3, 2, 0.1, 1e-5, rng);
  layer.norm().set_mode(Mode::eval);
  fill(layer.transform().weight(), 0.0);
  auto z = random_tensor<double>({1, 2, 4, 3}, 8);
  auto out = layer.forward(z, random_tensor<double>({1, 2, 4, 4}, 9));
  auto ref = relu(affine(z, layer.residual().weight()));
  for (std::size_t i = 0; i < out.numel(); ++i) EXPECT_NEAR(out.values()[i], ref.values()[i] / std::sqrt(1 + 1e-5), 1e-12);
}

TEST(GraphConv, TwoJointScalarOracle) {
  std::mt19937_64 rng(10);
  GraphConvLayer<double> layer(2, 2, 0.1, 0.0, rng);
  layer.norm().set_mode(Mode::eval);
  std::vector<double> wy{1, 2, 0, -1}, wz{0.5, 0, 0, 0.5};
  std::copy(wy.begin(), wy.end(), layer.transform().weight().mutable_values().begin());
  std::copy(wz.begin(), wz.end(), layer.residual().weight().mutable_values().begin());
  const double Z[2][2] = {{1, 2}, {3, -1}};
  const double G[2][2] = {{0.75, 0.25}, {0.4, 0.6}};
  auto out = layer.forward(make<double>({1, 1, 2, 2}, {1, 2, 3, -1}), make<double>({1, 1, 2, 2}, {0.75, 0.25, 0.4, 0.6}));
  for (int i = 0; i < 2; ++i) {
    double gz[2] = {0, 0};
    for (int j = 0; j < 2; ++j) {
      for (int c = 0; c < 2; ++c) gz[c] += G[i][j] * Z[j][c];
    }
    for (int o = 0; o < 2; ++o) {
      double pre = 0;
      for (int c = 0; c < 2; ++c) pre += gz[c] * wy[o * 2 + c] + Z[i][c] * wz[o * 2 + c];
      EXPECT_NEAR(out.values()[i * 2 + o], std::max(0.0, pre), 1e-12);
    }
  }
}

TEST(JointLevel, PermutationEquivariance) {
  std::mt19937_64 rng(11);
  JointLevelModule<double> jl(small(6), rng);
  jl.set_mode(Mode::eval);
  auto z = random_tensor<double>({2, 3, 6, 3}, 12);
  auto types = identity_types(6);
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<int> ptypes(6);
  std::vector<double> pz(z.numel());
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t i = 0; i < 6; ++i) {
      ptypes[i] = types[perm[i]];
      for (std::size_t c = 0; c < 3; ++c) pz[(r * 6 + i) * 3 + c] = z.values()[(r * 6 + perm[i]) * 3 + c];
    }
  }
  auto a = jl.forward(z, types).features;
  auto b = jl.forward(make<double>(z.shape(), pz), ptypes).features;
  const std::size_t c = a.dim(3);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        EXPECT_NEAR(b.values()[(r * 6 + i) * c + ch], a.values()[(r * 6 + perm[i]) * c + ch], 1e-12);
      }
    }
  }
}

TEST(JointLevel, AblationFlagsChangeInputWidths) {
  auto cfg = small();
  cfg.graph_uses_joint_type = false;
  std::mt19937_64 rng(13);
  JointLevelModule<double> jl(cfg, rng);
  EXPECT_EQ(jl.theta().in_features(), 3u);
  EXPECT_EQ(jl.layers()[0].transform().in_features(), 6u);
  cfg.passing_uses_joint_type = false;
  JointLevelModule<double> none(cfg, rng);
  std::vector<NamedTensor<double>> names;
  none.collect(names, "jl");
  for (const auto& n : names) EXPECT_EQ(n.name.find("joint_type"), std::string::npos);
}

TEST(JointLevel, ZeroWeightsGiveZeroInEvalMode) {
  std::mt19937_64 rng(14);
  JointLevelModule<double> jl(small(), rng);
  jl.set_mode(Mode::eval);
  for (auto& l : jl.layers()) {
    fill(l.transform().weight(), 0.0);
    fill(l.residual().weight(), 0.0);
  }
  auto out = jl.forward(random_tensor<double>({1, 2, 4, 3}, 15), identity_types(4));
  for (double v : out.features.values()) EXPECT_EQ(v, 0.0);
}

TEST(JointLevel, GradientCheckThroughAdjacencyAndOneLayer) {
  auto cfg = small();
  cfg.gcn_dims = {3};
  std::mt19937_64 rng(16);
  JointLevelModule<double> jl(cfg, rng);
  auto z = random_tensor<double>({2, 2, 4, 3}, 17, 1.0, true);
  auto types = identity_types(4);
  std::vector<NamedTensor<double>> params{{"z", z}};
  jl.collect(params, "jl");
  auto probe = random_tensor<double>({1, 2 * 2 * 4 * 3}, 18);
  GradCheckOptions opt;
  opt.skip_kinks = true;
  auto rep = grad_check(
      [&] { return reshape(affine(reshape(jl.forward(z, types).features, {1, 48}), probe), {1}); }, params, opt);
  // phi.bias receives a structurally zero gradient (row softmax is shift invariant).
  for (const auto& e : rep.entries) {
    if (e.name == "jl.phi.bias") {
      EXPECT_LT(std::abs(e.analytic_at_worst), 1e-12);
      continue;
    }
    EXPECT_LT(e.max_rel_error, 1e-4) << e.name;
  }
}
