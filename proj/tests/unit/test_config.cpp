#include <gtest/gtest.h>

#include "sgn/config/config.hpp"
#include "sgn/error.hpp"

using namespace sgn;

TEST(ConfigTree, ParsesSectionsAndTypes) {
  auto t = ConfigTree::parse_text(R"(
# comment
seed = 3
[model]
scales = [15, 20]
share_trunk = false
[train]
lr = 0.01
[data]
source = "synthetic"
)");
  EXPECT_EQ(t.get_int("seed", 0), 3);
  EXPECT_EQ(t.get_int_list("model.scales", {}), (std::vector<std::int64_t>{15, 20}));
  EXPECT_FALSE(t.get_bool("model.share_trunk", true));
  EXPECT_DOUBLE_EQ(t.get_double("train.lr", 0), 0.01);
  EXPECT_EQ(t.get_string("data.source", ""), "synthetic");
}

TEST(ConfigTree, OverridesAndErrors) {
  auto t = ConfigTree::parse_text("[train]\nepochs = 5\n");
  t.apply_override("train.epochs=7");
  EXPECT_EQ(t.get_int("train.epochs", 0), 7);
  EXPECT_THROW(t.apply_override("no_equals_sign"), ConfigError);
  EXPECT_THROW(ConfigTree::parse_text("[model\n"), ConfigError);
  EXPECT_THROW(t.get_int_list("train.epochs", {}), ConfigError);
}

TEST(RunConfig, UnknownKeyRejected) {
  EXPECT_THROW(RunConfig::from_tree(ConfigTree::parse_text("[model]\nc11 = 3\n")), ConfigError);
}

TEST(RunConfig, ResolvedTextRoundTrips) {
  auto cfg = RunConfig::from_tree(ConfigTree::parse_text(
      "seed = 9\nprecision = \"float64\"\n[model]\nscales = [20]\npartition = \"coarse1\"\n[data]\nsource = \"synthetic\"\n"));
  EXPECT_EQ(cfg.model.init_seed, 9u);
  EXPECT_EQ(cfg.train.seed, 9u);
  EXPECT_EQ(cfg.precision, Precision::float64);
  EXPECT_EQ(cfg.model.movement, MovementPreset::coarse1);
  const std::string text = cfg.to_text();
  auto again = RunConfig::from_tree(ConfigTree::parse_text(text));
  EXPECT_EQ(again.to_text(), text);
}

TEST(RunConfig, CanonicalSourceNeedsPath) {
  EXPECT_THROW(RunConfig::from_tree(ConfigTree::parse_text("")), ConfigError);
}
