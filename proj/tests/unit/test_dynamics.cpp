#include <cmath>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sgn/error.hpp"
#include "sgn/model/dynamics.hpp"

using namespace sgn;
using sgn::test::random_tensor;

namespace {

template <typename T>
void zero_mlp(EmbedMLP<T>& m) {
  for (auto* t : {&m.first().weight(), &m.first().bias(), &m.second().weight(), &m.second().bias()}) {
    std::fill(t->mutable_values().begin(), t->mutable_values().end(), T(0));
  }
}

}  // namespace

TEST(Velocity, ConstantSequenceIsZero) {
  std::vector<double> p(4 * 2 * 3, 0.7);
  for (double v : compute_velocity<double>(p, 4, 2)) EXPECT_EQ(v, 0.0);
}

TEST(Velocity, LinearMotionAndTelescoping) {
  std::vector<double> p(5 * 1 * 3, 0.0);
  for (int t = 0; t < 5; ++t) p[t * 3] = t + 1;
  auto v = compute_velocity<double>(p, 5, 1);
  EXPECT_EQ(v[0], 0.0);
  for (int t = 1; t < 5; ++t) EXPECT_EQ(v[t * 3], 1.0);

  auto q = random_tensor<double>({6, 3, 3}, 1);
  auto w = compute_velocity<double>(q.values(), 6, 3);
  for (std::size_t k = 0; k < 9; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < 6; ++t) s += w[t * 9 + k];
    EXPECT_NEAR(s, q.values()[5 * 9 + k] - q.values()[k], 1e-12);
  }
}

TEST(FineGrained, ReferenceJointsAreZero) {
  const auto part = BodyPartition::ntu_fine5();
  auto x = random_tensor<double>({2, 25, 3}, 2);
  auto m = compute_fine_grained<double>(x.values(), 2, 25, part);
  for (int ref : part.reference_of_part) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(m[ref * 3 + c], 0.0);
  }
}

TEST(FineGrained, TranslationInvariant) {
  const auto part = BodyPartition::ntu_fine5();
  auto x = random_tensor<double>({1, 25, 3}, 3);
  std::vector<double> shifted(x.values().begin(), x.values().end());
  for (std::size_t k = 0; k < 25; ++k) shifted[k * 3 + 1] += 4.0;
  auto a = compute_fine_grained<double>(x.values(), 1, 25, part);
  auto b = compute_fine_grained<double>(shifted, 1, 25, part);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(FineGrained, TwoJointToy) {
  BodyPartition part{{0, 0}, {0}};
  std::vector<double> x{0, 0, 0, 1, 1, 1};
  EXPECT_EQ(compute_fine_grained<double>(x, 1, 2, part), x);
}

TEST(Partition, DefaultsAndValidation) {
  const auto p = BodyPartition::ntu_fine5();
  EXPECT_EQ(p.num_parts(), 5u);
  EXPECT_EQ(p.reference_of_part, (std::vector<int>{7, 11, 13, 17, 1}));
  EXPECT_NO_THROW(p.validate(25));
  EXPECT_THROW(p.validate(20), ConfigError);
  BodyPartition bad{{0, 1}, {1, 1}};  // reference of part 0 lies in part 1
  EXPECT_THROW(bad.validate(2), ConfigError);
  EXPECT_THROW(partition_for(MovementPreset::fine5, 20), ConfigError);
  EXPECT_FALSE(partition_for(MovementPreset::none, 25));
  EXPECT_EQ(parse_movement_preset("coarse1"), MovementPreset::coarse1);
}

TEST(DynamicsRepresentation, AllZeroBranchesGiveZero) {
  std::mt19937_64 rng(1);
  DynamicsRepresentation<double> dr({8, true, MovementPreset::fine5}, rng);
  zero_mlp(dr.position());
  zero_mlp(*dr.velocity());
  zero_mlp(*dr.movement());
  zero_mlp(*dr.movement_velocity());
  const auto part = BodyPartition::ntu_fine5();
  auto z = dr.forward(random_tensor<double>({2, 3, 25, 3}, 4), &part);
  EXPECT_EQ(z.shape(), (Shape{2, 3, 25, 8}));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(DynamicsRepresentation, AdditivityOfBranches) {
  std::mt19937_64 rng(2);
  DynamicsRepresentation<double> dr({8, true, MovementPreset::fine5}, rng);
  const auto part = BodyPartition::ntu_fine5();
  auto x = random_tensor<double>({1, 3, 25, 3}, 5);
  zero_mlp(*dr.velocity());
  zero_mlp(*dr.movement());
  zero_mlp(*dr.movement_velocity());
  auto z = dr.forward(x, &part);
  auto p = dr.position().forward(x);
  for (std::size_t i = 0; i < z.numel(); ++i) EXPECT_DOUBLE_EQ(z.values()[i], p.values()[i]);
}

TEST(DynamicsRepresentation, ScalarOracleSingleJoint) {
  std::mt19937_64 rng(3);
  DynamicsRepresentation<double> dr({1, false, MovementPreset::none}, rng);
  auto& e = dr.position();
  std::vector<double> w1{0.5, -1.0, 2.0};
  std::copy(w1.begin(), w1.end(), e.first().weight().mutable_values().begin());
  e.first().bias().mutable_values()[0] = 0.25;
  e.second().weight().mutable_values()[0] = 1.5;
  e.second().bias().mutable_values()[0] = -0.1;
  auto z = dr.forward(sgn::test::make<double>({1, 1, 1, 3}, {1.0, 0.5, 0.75}), nullptr);
  const double h = std::max(0.0, 0.5 * 1.0 - 1.0 * 0.5 + 2.0 * 0.75 + 0.25);
  EXPECT_DOUBLE_EQ(z.item(), std::max(0.0, 1.5 * h - 0.1));
}

TEST(DynamicsRepresentation, MovementNeedsPartition) {
  std::mt19937_64 rng(4);
  DynamicsRepresentation<double> dr({4, true, MovementPreset::fine5}, rng);
  EXPECT_THROW(dr.forward(random_tensor<double>({1, 2, 25, 3}, 6), nullptr), ConfigError);
}

TEST(DynamicsRepresentation, BranchesDoNotShareWeights) {
  std::mt19937_64 rng(5);
  DynamicsRepresentation<double> dr({4, true, MovementPreset::fine5}, rng);
  std::vector<NamedTensor<double>> names;
  dr.collect(names, "dr");
  EXPECT_EQ(names.size(), 16u);
  EXPECT_NE(dr.position().first().weight().node_ptr(), dr.velocity()->first().weight().node_ptr());
}
