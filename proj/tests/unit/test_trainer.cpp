#include <cmath>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sgn/error.hpp"
#include "sgn/preprocess/preprocess.hpp"
#include "sgn/train/synthetic.hpp"
#include "sgn/train/trainer.hpp"

using namespace sgn;

namespace {

ModelConfig tiny_model() {
  ModelConfig c;
  c.scales = {4, 6};
  c.num_classes = 4;
  c.c1 = 4;
  c.c2 = 4;
  c.gcn_dims = {4, 4, 4};
  c.c4 = 6;
  c.frame_hidden = 3;
  c.init_seed = 1;
  return c;
}

struct Data {
  std::vector<SkeletonSequence> records;
  std::vector<std::size_t> train, test;
};

Data tiny_data() {
  SyntheticConfig sc;
  sc.train_per_class = 2;
  sc.test_per_class = 2;
  sc.min_frames = 10;
  sc.max_frames = 14;
  Data d;
  for (auto& s : make_synthetic(sc)) d.records.push_back(translate_to_first_frame(s));
  for (std::size_t i = 0; i < d.records.size(); ++i) (d.records[i].subject_id == 1 ? d.train : d.test).push_back(i);
  return d;
}

TrainConfig tiny_train() {
  TrainConfig t;
  t.epochs = 3;
  t.decay_epochs = {};
  t.batch_size = 3;
  t.seed = 4;
  return t;
}

}  // namespace

TEST(Schedule, Examples) {
  TrainConfig cfg;
  EXPECT_EQ(lr_at(1, cfg), 0.001);
  EXPECT_EQ(lr_at(59, cfg), 0.001);
  EXPECT_EQ(lr_at(60, cfg), 1e-4);
  EXPECT_EQ(lr_at(89, cfg), 1e-4);
  EXPECT_EQ(lr_at(90, cfg), 1e-5);
  EXPECT_EQ(lr_at(110, cfg), 1e-6);
  EXPECT_EQ(lr_at(120, cfg), 1e-6);
  cfg.decay_epochs.clear();
  EXPECT_EQ(lr_at(100, cfg), 0.001);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.decay_epochs = {90, 60};
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.decay_epochs = {130};
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.batch_size = 1;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Metrics, CsvRoundTrip) {
  MetricsRow a{1, 1.25, 0.5, std::nullopt, 0.001, 0.0};
  MetricsRow b{2, 0.75, 0.75, 0.625, 0.001, 1.5};
  const std::string text = metrics_header() + "\n" + metrics_line(a) + "\n" + metrics_line(b) + "\n";
  auto rows = parse_metrics_csv(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].val_accuracy);
  EXPECT_EQ(*rows[1].val_accuracy, 0.625);
  EXPECT_EQ(rows[1].train_loss, 0.75);
  EXPECT_EQ(metrics_header(), "epoch,train_loss,train_accuracy,val_accuracy,lr,seconds");
}

TEST(Trainer, ZeroLearningRateLeavesParametersUnchanged) {
  auto d = tiny_data();
  SGNModel<double> model(tiny_model());
  std::vector<std::vector<double>> before;
  for (const auto& nt : model.state()) {
    if (nt.trainable) before.push_back(sgn::test::to_vec(nt.tensor));
  }
  TrainConfig t = tiny_train();
  t.lr = 0.0;
  t.weight_decay = 0.0;
  Trainer<double> trainer(model, t);
  trainer.train_epoch(d.records, d.train, 1);
  std::size_t i = 0;
  for (const auto& nt : model.state()) {
    if (nt.trainable) EXPECT_EQ(sgn::test::to_vec(nt.tensor), before[i++]) << nt.name;
  }
}

TEST(Trainer, SeededEpochIsBitIdentical) {
  auto d = tiny_data();
  auto run = [&] {
    SGNModel<double> model(tiny_model());
    Trainer<double> trainer(model, tiny_train());
    std::vector<MetricsRow> rows;
    for (std::size_t e = 1; e <= 2; ++e) rows.push_back(trainer.train_epoch(d.records, d.train, e));
    return rows;
  };
  auto a = run(), b = run();
  for (std::size_t e = 0; e < 2; ++e) {
    EXPECT_EQ(a[e].train_loss, b[e].train_loss);
    EXPECT_EQ(a[e].train_accuracy, b[e].train_accuracy);
  }
  EXPECT_TRUE(std::isfinite(a[0].train_loss));
}

TEST(Evaluate, SingleDeterministicViewMatchesDirectForward) {
  auto d = tiny_data();
  ModelConfig mc = tiny_model();
  mc.scales = {6};
  SGNModel<double> model(mc);
  EvalOptions eo;
  eo.views = 1;
  eo.mode = SamplingMode::deterministic_first;
  auto res = evaluate(model, d.records, d.test, eo);
  model.set_mode(Mode::eval);
  std::size_t correct = 0;
  for (std::size_t i : d.test) {
    std::vector<SkeletonSequence> one{sample_clips(d.records[i], 6, SamplingMode::deterministic_first, 0)};
    auto scores = softmax_scores(model.logits(stack_coords<double>(one), 0));
    if (predict(scores[0]) == static_cast<std::size_t>(d.records[i].label)) ++correct;
  }
  EXPECT_DOUBLE_EQ(res.accuracy, static_cast<double>(correct) / d.test.size());
  EXPECT_EQ(model.mode(), Mode::eval);
}

TEST(Evaluate, DuplicatingARecordLeavesAccuracyUnchanged) {
  auto d = tiny_data();
  SGNModel<double> model(tiny_model());
  EvalOptions eo;
  eo.seed = 3;
  auto base = evaluate(model, d.records, d.test, eo);
  auto idx = d.test;
  idx.push_back(d.test.front());
  auto dup = evaluate(model, d.records, idx, eo);
  EXPECT_EQ(base.accuracy, dup.accuracy);
  EXPECT_EQ(base.sources.size(), dup.sources.size());
}

TEST(Evaluate, PerClassRecomposesOverall) {
  auto d = tiny_data();
  SGNModel<double> model(tiny_model());
  auto res = evaluate(model, d.records, d.test, {});
  double weighted = 0.0;
  std::size_t total = 0;
  for (std::size_t k = 0; k < res.per_class_accuracy.size(); ++k) {
    if (res.class_support[k] == 0) continue;
    weighted += res.per_class_accuracy[k] * res.class_support[k];
    total += res.class_support[k];
  }
  EXPECT_NEAR(weighted / total, res.accuracy, 1e-9);
  for (const auto& s : res.scores) {
    double acc = 0.0;
    for (double p : s) acc += p;
    EXPECT_NEAR(acc, 1.0, 1e-12);
  }
}

TEST(CompareRuns, Examples) {
  EvalResult a;
  a.per_class_accuracy = {0.5, 0.8, 0.6};
  a.class_support = {2, 5, 3};
  EvalResult b = a;
  for (const auto& g : compare_runs(a, b)) EXPECT_EQ(g.delta, 0.0);
  b.per_class_accuracy[1] = 0.7;
  auto gains = compare_runs(a, b);
  ASSERT_EQ(gains.size(), 3u);
  EXPECT_EQ(gains[0].class_id, 1u);
  EXPECT_NEAR(gains[0].delta, 0.1, 1e-15);
  EXPECT_EQ(gains[1].delta, 0.0);
  // support-weighted deltas recompose the overall difference
  double overall_a = 0, overall_b = 0, weighted = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    overall_a += a.per_class_accuracy[k] * a.class_support[k] / 10.0;
    overall_b += b.per_class_accuracy[k] * b.class_support[k] / 10.0;
  }
  for (const auto& g : gains) weighted += g.delta * a.class_support[g.class_id] / 10.0;
  EXPECT_NEAR(weighted, overall_a - overall_b, 1e-15);
  EXPECT_NE(class_gain_csv(gains).find("class_id"), std::string::npos);
}

TEST(PerClassCsv, Header) {
  EvalResult r;
  r.per_class_accuracy = {1.0, 0.5};
  r.class_support = {1, 2};
  const std::vector<std::string> names{"wave", "sit"};
  const std::string csv = per_class_csv(r, names);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "class_id,class_name,accuracy");
  EXPECT_NE(csv.find("1,sit,0.5"), std::string::npos);
}

TEST(Synthetic, PairsAreTimeReversals) {
  SyntheticConfig sc;
  sc.noise = 0.0;
  sc.train_per_class = 1;
  sc.test_per_class = 0;
  auto recs = make_synthetic(sc);
  ASSERT_EQ(recs.size(), 4u);
  for (const auto& r : recs) {
    EXPECT_GE(r.frames, sc.min_frames);
    EXPECT_LE(r.frames, sc.max_frames);
  }
  // the moving part differs from rest somewhere, everything else stays put
  for (const auto& r : recs) {
    const auto moving = synthetic_moving_joints(r.label);
    for (std::size_t k = 0; k < 25; ++k) {
      double travel = 0.0;
      for (std::size_t t = 1; t < r.frames; ++t) {
        for (std::size_t c = 0; c < 3; ++c) travel += std::abs(r.at(t, k, c) - r.at(0, k, c));
      }
      const bool moves = std::find(moving.begin(), moving.end(), k) != moving.end();
      if (!moves) EXPECT_EQ(travel, 0.0) << "joint " << k;
    }
  }
  // the reversed class travels the same path in the opposite direction
  auto travel = [](const SkeletonSequence& r, std::size_t joint, std::size_t axis) {
    return r.at(r.frames - 1, joint, axis) - r.at(0, joint, axis);
  };
  const double raise = travel(recs[0], 7, 1), lower = travel(recs[1], 7, 1);
  const double swing = travel(recs[2], 19, 2), back = travel(recs[3], 19, 2);
  EXPECT_GT(std::abs(raise), 0.1);
  EXPECT_GT(std::abs(swing), 0.05);
  EXPECT_LT(raise * lower, 0.0);
  EXPECT_LT(swing * back, 0.0);
}
