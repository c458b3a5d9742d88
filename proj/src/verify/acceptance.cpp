#include "sgn/verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "sgn/config/config.hpp"
#include "sgn/io/canonical.hpp"
#include "sgn/io/ntu.hpp"
#include "sgn/io/protocol.hpp"
#include "sgn/model/checkpoint.hpp"
#include "sgn/model/model.hpp"
#include "sgn/numerics/grad_check.hpp"
#include "sgn/numerics/ops.hpp"
#include "sgn/train/run.hpp"
#include "sgn/train/synthetic.hpp"
#include "sgn/train/trainer.hpp"

namespace sgn {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CriterionResult criterion(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

RunOptions run_options(std::filesystem::path dir, std::optional<std::size_t> stop_after = std::nullopt) {
  RunOptions o;
  o.out_dir = std::move(dir);
  o.stop_after = stop_after;
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

template <typename T>
Tensor<T> random_coords(std::size_t n, std::size_t frames, std::size_t joints, std::mt19937_64& rng, double sd = 0.5) {
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<T> v(n * frames * joints * 3);
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return Tensor<T>({n, frames, joints, 3}, std::move(v));
}

// Reorders the joint axis of [N, T, J, 3]: new slot i takes old slot perm[i].
template <typename T>
Tensor<T> permute_joints(const Tensor<T>& x, std::span<const std::size_t> perm) {
  const std::size_t n = x.dim(0) * x.dim(1);
  const std::size_t j = x.dim(2);
  std::vector<T> out(x.numel());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < j; ++i) {
      for (std::size_t c = 0; c < 3; ++c) out[(r * j + i) * 3 + c] = x.values()[(r * j + perm[i]) * 3 + c];
    }
  }
  return Tensor<T>(x.shape(), std::move(out));
}

template <typename T>
Tensor<T> permute_frames(const Tensor<T>& x, std::span<const std::size_t> perm) {
  const std::size_t frames = x.dim(1);
  const std::size_t stride = x.dim(2) * x.dim(3);
  std::vector<T> out(x.numel());
  for (std::size_t b = 0; b < x.dim(0); ++b) {
    for (std::size_t t = 0; t < frames; ++t) {
      std::copy_n(x.values().begin() + static_cast<std::ptrdiff_t>((b * frames + perm[t]) * stride), stride,
                  out.begin() + static_cast<std::ptrdiff_t>((b * frames + t) * stride));
    }
  }
  return Tensor<T>(x.shape(), std::move(out));
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.values()[i]) - static_cast<double>(b.values()[i])));
  }
  return m;
}

template <typename T>
void zero_embed(EmbedMLP<T>* e) {
  if (e == nullptr) return;
  for (auto* t : {&e->second().weight(), &e->second().bias()}) {
    auto v = t->mutable_values();
    std::fill(v.begin(), v.end(), T(0));
  }
}

// ---------------------------------------------------------------- criterion 1

CriterionResult parameter_counts() {
  CriterionResult r = criterion(1, "parameter counts (SS 0.73M, MS 1.50M, MS-sep 2.19M)");
  const auto t0 = Clock::now();
  const double ss = static_cast<double>(SGNModel<float>(ModelConfig::ss_sgn(120)).parameter_count());
  const double ms = static_cast<double>(SGNModel<float>(ModelConfig::ms_sgn(120)).parameter_count());
  const double sep = static_cast<double>(SGNModel<float>(ModelConfig::ms_sgn_separate(120)).parameter_count());
  r.seconds = since(t0);
  const double e_ss = ss / 0.73e6 - 1.0;
  const double e_ms = ms / 1.50e6 - 1.0;
  const double e_sep = sep / 2.19e6 - 1.0;
  r.passed = std::abs(e_ss) <= 0.03 && std::abs(e_ms) <= 0.03 && sep > ms && std::abs(e_sep) <= 0.05 && r.seconds < 1.0;
  r.detail = "SS " + num(ss) + " (" + num(100 * e_ss) + "%), MS " + num(ms) + " (" + num(100 * e_ms) + "%), sep " +
             num(sep) + " (" + num(100 * e_sep) + "%), " + num(r.seconds) + " s";
  return r;
}

// ---------------------------------------------------------------- criterion 2

CriterionResult gradient_check() {
  CriterionResult r = criterion(2, "full-model gradient check (J=5, T in {3,4,5}, K=3, batch 4, 64-bit)");
  const auto t0 = Clock::now();
  ModelConfig c;
  c.scales = {3, 4, 5};
  c.num_classes = 3;
  c.num_joints = 5;
  c.c1 = 4;
  c.c2 = 6;
  c.gcn_dims = {5, 6, 4};
  c.c4 = 7;
  c.frame_hidden = 3;
  c.movement = MovementPreset::coarse1;
  c.init_seed = 1;
  SGNModel<double> model(c);
  JointLayout layout = model.layout();
  layout.partition = BodyPartition{{0, 0, 1, 1, 1}, {1, 3}};
  model.set_layout(layout);

  std::mt19937_64 rng(101);
  std::vector<Tensor<double>> views;
  for (std::size_t s : c.scales) views.push_back(random_coords<double>(4, s, 5, rng));
  const std::vector<int> labels{0, 1, 2, 1};
  auto loss = [&] { return multi_scale_loss<double>(model.ms_forward(views), labels, 0.1); };

  std::vector<NamedTensor<double>> params;
  for (auto& nt : model.state()) {
    if (nt.trainable) params.push_back(nt);
  }
  GradCheckOptions opt;
  opt.step = 1e-5;
  opt.tolerance = 1e-4;
  opt.skip_kinks = true;
  const GradCheckReport report = grad_check(loss, params, opt);
  r.seconds = since(t0);

  const std::size_t total = report.coords_checked + report.kinks_skipped;
  const bool few_kinks = report.kinks_skipped * 100 <= total;
  r.passed = report.passed && few_kinks && r.seconds < 120.0;
  r.detail = std::to_string(report.entries.size()) + " groups, " + std::to_string(report.coords_checked) +
             " coords, " + std::to_string(report.kinks_skipped) + " at relu/max switches skipped; max rel err " +
             num(report.max_rel_error);
  for (const auto& e : report.failures(opt.tolerance)) {
    r.detail += "; " + e.name + " rel " + num(e.max_rel_error) + " (analytic " + num(e.analytic_at_worst) +
                ", numeric " + num(e.numeric_at_worst) + ")";
  }
  r.detail += "; " + num(r.seconds) + " s";
  return r;
}

// ---------------------------------------------------------------- criterion 3

template <typename T>
std::pair<double, double> adjacency_stats(std::uint64_t seed) {
  SGNModel<T> model(ModelConfig::ss_sgn(120));
  std::mt19937_64 rng(seed);
  // 5 samples x 20 frames = 100 frame graphs.
  const Tensor<T> adj = model.forward_scale(random_coords<T>(5, 20, 25, rng), 0).adjacency;
  double worst_sum = 0.0;
  double min_entry = 1.0;
  for (std::size_t row = 0; row < adj.numel() / 25; ++row) {
    double s = 0.0;
    for (std::size_t j = 0; j < 25; ++j) {
      const double v = static_cast<double>(adj.values()[row * 25 + j]);
      s += v;
      min_entry = std::min(min_entry, v);
    }
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }
  return {worst_sum, min_entry};
}

CriterionResult adjacency_normalization() {
  CriterionResult r = criterion(3, "adjacency rows sum to 1 and are positive (100 frames)");
  const auto t0 = Clock::now();
  const auto [sum32, min32] = adjacency_stats<float>(3);
  const auto [sum64, min64] = adjacency_stats<double>(3);
  r.seconds = since(t0);
  r.passed = sum32 <= 1e-6 && min32 > 0.0 && sum64 <= 1e-6 && min64 > 0.0;
  r.detail = "32-bit: max |row sum - 1| " + num(sum32) + ", min entry " + num(min32) + "; 64-bit: " + num(sum64) +
             ", " + num(min64);
  return r;
}

// ---------------------------------------------------------------- criterion 4

template <typename T>
double permutation_drift(std::size_t trials) {
  SGNModel<T> model(ModelConfig::ss_sgn(120));
  std::mt19937_64 rng(4);
  const Tensor<T> x = random_coords<T>(2, 20, 25, rng);
  const JointLayout base = model.layout();
  const Tensor<T> reference = model.logits(x, 0);
  double worst = 0.0;
  std::vector<std::size_t> perm(25);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    model.set_layout(permute_layout(base, perm));
    worst = std::max(worst, max_abs_diff(reference, model.logits(permute_joints(x, perm), 0)));
  }
  return worst;
}

CriterionResult joint_permutation() {
  CriterionResult r = criterion(4, "joint-permutation invariance of logits (20 permutations)");
  const auto t0 = Clock::now();
  const double d32 = permutation_drift<float>(20);
  const double d64 = permutation_drift<double>(20);
  r.seconds = since(t0);
  r.passed = d32 < 1e-5 && d64 < 1e-10;
  r.detail = "max |delta logit| 32-bit " + num(d32) + " (< 1e-5), 64-bit " + num(d64) + " (< 1e-10)";
  return r;
}

// ---------------------------------------------------------------- criterion 5

CriterionResult frame_order() {
  CriterionResult r = criterion(5, "frame-order contract (invariant without frame index, sensitive with it)");
  const auto t0 = Clock::now();
  ModelConfig c = ModelConfig::ss_sgn(120);
  c.temporal_kernel = 1;
  std::mt19937_64 rng(5);
  const Tensor<float> x = random_coords<float>(2, 20, 25, rng);
  std::vector<std::size_t> perm(20);

  SGNModel<float> blind(c);
  zero_embed(blind.shared_frame_index());
  zero_embed(blind.dynamics().velocity());
  zero_embed(blind.dynamics().movement_velocity());
  SGNModel<float> aware(c);
  zero_embed(aware.dynamics().velocity());
  zero_embed(aware.dynamics().movement_velocity());

  const Tensor<float> ref_blind = blind.logits(x, 0);
  const Tensor<float> ref_aware = aware.logits(x, 0);
  double blind_drift = 0.0;
  double aware_drift = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const Tensor<float> xp = permute_frames(x, perm);
    blind_drift = std::max(blind_drift, max_abs_diff(ref_blind, blind.logits(xp, 0)));
    aware_drift = std::max(aware_drift, max_abs_diff(ref_aware, aware.logits(xp, 0)));
  }
  r.seconds = since(t0);
  r.passed = blind_drift < 1e-5 && aware_drift > 1e-3;
  r.detail = "without frame index max |delta logit| " + num(blind_drift) + " (< 1e-5); with frame index " +
             num(aware_drift) + " (> 1e-3)";
  return r;
}

// ------------------------------------------------------- criteria 6 and 10

struct VariantOutcome {
  std::unique_ptr<SGNModel<float>> model;
  std::size_t epochs = 0;
  std::size_t first_perfect = 0;  // 0: never
  double final_train_accuracy = 0.0;
  EvalResult test;
};

struct OverfitStudy {
  std::vector<SkeletonSequence> records;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  VariantOutcome full;
  VariantOutcome neither;
  VariantOutcome frame_index_only;
  VariantOutcome kernel3_only;
  double seconds = 0.0;
};

ModelConfig overfit_model(bool frame_index, std::size_t kernel, bool velocity) {
  ModelConfig c;
  c.num_classes = 4;
  c.c1 = 16;
  c.c2 = 32;
  c.gcn_dims = {32, 32, 32};
  c.c4 = 64;
  c.frame_hidden = 16;
  c.frame_index = frame_index;
  c.temporal_kernel = kernel;
  c.velocity = velocity;
  c.init_seed = 3;
  return c;
}

TrainConfig overfit_training(std::size_t epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.decay_epochs = {};
  t.batch_size = 16;
  t.seed = 5;
  return t;
}

// Trains until train accuracy has been perfect for `patience` consecutive
// epochs (and at least `min_epochs` have run), or `max_epochs` is reached.
VariantOutcome train_variant(const OverfitStudy& s, const ModelConfig& mc, std::size_t min_epochs,
                             std::size_t max_epochs, std::size_t patience, std::ostream* log, const char* tag) {
  VariantOutcome out;
  out.model = std::make_unique<SGNModel<float>>(mc);
  Trainer<float> trainer(*out.model, overfit_training(max_epochs));
  std::size_t streak = 0;
  for (std::size_t e = 1; e <= max_epochs; ++e) {
    const MetricsRow row = trainer.train_epoch(s.records, s.train, e);
    out.epochs = e;
    out.final_train_accuracy = row.train_accuracy;
    if (row.train_accuracy == 1.0) {
      if (out.first_perfect == 0) out.first_perfect = e;
      ++streak;
    } else {
      streak = 0;
    }
    if (patience > 0 && streak >= patience && e >= min_epochs) break;
  }
  EvalOptions eo;
  eo.seed = 11;
  out.test = evaluate(*out.model, s.records, s.test, eo);
  if (log) {
    *log << "  [" << tag << "] epochs " << out.epochs << ", first 100% train epoch " << out.first_perfect
         << ", test accuracy " << num(out.test.accuracy) << '\n';
  }
  return out;
}

std::unique_ptr<OverfitStudy> run_overfit_study(std::ostream* log) {
  const auto t0 = Clock::now();
  auto s = std::make_unique<OverfitStudy>();
  for (auto& seq : make_synthetic({})) s->records.push_back(translate_to_first_frame(seq));
  for (std::size_t i = 0; i < s->records.size(); ++i) {
    (s->records[i].subject_id == 1 ? s->train : s->test).push_back(i);
  }
  s->full = train_variant(*s, overfit_model(true, 3, true), 40, 300, 5, log, "frame index + kernel 3 + velocity");
  s->neither = train_variant(*s, overfit_model(false, 1, false), 60, 60, 0, log, "no frame index, kernel 1");
  s->frame_index_only = train_variant(*s, overfit_model(true, 1, false), 60, 60, 0, log, "frame index, kernel 1");
  s->kernel3_only = train_variant(*s, overfit_model(false, 3, false), 60, 60, 0, log, "no frame index, kernel 3");
  s->seconds = since(t0);
  return s;
}

CriterionResult overfit_oracle(const OverfitStudy& s) {
  CriterionResult r = criterion(6, "synthetic overfit oracle and frame-order ablation");
  r.seconds = s.seconds;
  const bool reached = s.full.first_perfect != 0 && s.full.first_perfect <= 300;
  const bool generalizes = s.full.test.accuracy >= 0.9;
  const bool blind_fails = s.neither.test.accuracy <= 0.75;
  const bool fi_separates = s.frame_index_only.test.accuracy >= 0.9;
  const bool k3_separates = s.kernel3_only.test.accuracy >= 0.9;
  r.passed = reached && generalizes && blind_fails && fi_separates && k3_separates && s.seconds < 1800.0;
  r.detail = "full model: 100% train at epoch " + std::to_string(s.full.first_perfect) + ", test " +
             num(s.full.test.accuracy) + " (>= 0.9); reversed pairs without frame index and kernel 1: test " +
             num(s.neither.test.accuracy) + " (<= 0.75); frame index only " + num(s.frame_index_only.test.accuracy) +
             ", kernel 3 only " + num(s.kernel3_only.test.accuracy) + " (>= 0.9); " + num(s.seconds) + " s";
  return r;
}

CriterionResult smp_conservation(const OverfitStudy& s) {
  CriterionResult r = criterion(10, "SMP probe conservation and informative joints");
  const auto t0 = Clock::now();
  SGNModel<float>& model = *s.full.model;
  const Mode previous = model.mode();
  model.set_mode(Mode::eval);
  NoGradGuard no_grad;
  const std::size_t scale = 1;
  const std::size_t frames = model.config().scales[scale];
  const std::size_t c3 = model.config().gcn_dims.back();
  bool conserved = true;
  std::size_t correct = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < s.test.size(); ++i) {
    const SkeletonSequence& rec = s.records[s.test[i]];
    const SkeletonSequence view = sample_clips(rec, frames, SamplingMode::deterministic_first, 0);
    const std::vector<SkeletonSequence> one{view};
    const ScaleOutput<float> out = model.forward_scale(stack_coords<float>(one), scale);
    const SmpProbe probe = smp_probe(out.smp_argmax, model.config().num_joints);
    if (probe.total() != c3 * frames) conserved = false;
    // Every test record is its own source clip, so index i lines up with the evaluation.
    if (s.full.test.predictions[i] != static_cast<std::size_t>(rec.label)) continue;
    ++correct;
    const auto moving = synthetic_moving_joints(rec.label);
    if (std::any_of(probe.top5.begin(), probe.top5.end(), [&](std::size_t j) {
          return std::find(moving.begin(), moving.end(), j) != moving.end();
        })) {
      ++hits;
    }
  }
  model.set_mode(previous);
  r.seconds = since(t0);
  const double ratio = correct == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(correct);
  r.passed = conserved && correct > 0 && ratio >= 0.9;
  r.detail = std::string("counts sum to C3*T = ") + std::to_string(c3 * frames) +
             (conserved ? " for every sequence" : " VIOLATED") + "; moving-part joint in top 5 for " +
             std::to_string(hits) + "/" + std::to_string(correct) + " correctly classified (" + num(ratio) +
             ", >= 0.9)";
  return r;
}

// ---------------------------------------------------------------- criterion 7

CriterionResult schedule_table() {
  CriterionResult r = criterion(7, "learning-rate schedule table");
  const TrainConfig cfg;
  bool ok = true;
  std::string first_bad;
  for (std::size_t e = 1; e <= 120; ++e) {
    const double expected = e < 60 ? 0.001 : e < 90 ? 1e-4 : e < 110 ? 1e-5 : 1e-6;
    if (lr_at(e, cfg) != expected && ok) {
      ok = false;
      first_bad = "epoch " + std::to_string(e) + " gives " + format_double(lr_at(e, cfg));
    }
  }
  r.passed = ok;
  r.detail = ok ? "epochs 1-59: 0.001, 60-89: 1e-4, 90-109: 1e-5, 110-120: 1e-6 (exact)" : first_bad;
  return r;
}

// ---------------------------------------------------------------- criterion 8

CriterionResult closed_form_losses() {
  CriterionResult r = criterion(8, "closed-form smoothed cross entropy");
  const std::size_t k = 120;
  const Tensor<double> logits = Tensor<double>::full({4, k}, 0.37);
  const std::vector<int> labels{0, 5, 119, 60};
  const double single = cross_entropy_label_smoothed(logits, labels, 0.1).item();
  const std::vector<Tensor<double>> three{logits, logits, logits};
  const double triple = multi_scale_loss<double>(three, labels, 0.1).item();
  const double e1 = std::abs(single - std::log(120.0));
  const double e3 = std::abs(triple - 3.0 * std::log(120.0));
  r.passed = e1 <= 1e-9 && e3 <= 1e-9;
  r.detail = "uniform logits K=120: |CE - ln K| " + num(e1) + ", |3-scale sum - 3 ln K| " + num(e3);
  return r;
}

// ---------------------------------------------------------------- criterion 9

std::vector<SkeletonSequence> parse_corpus(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".skeleton") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SkeletonSequence> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    for (auto& seq : parse_ntu_skeleton(in, f.stem().string(), "ntu60")) out.push_back(std::move(seq));
  }
  return out;
}

CriterionResult round_trip(const std::filesystem::path& fixture_dir) {
  CriterionResult r = criterion(9, "parser/canonical round trip and split purity");
  const auto t0 = Clock::now();
  try {
    const auto parsed = parse_corpus(fixture_dir / "ntu");
    std::ostringstream out;
    write_canonical_header(out);
    for (const auto& seq : parsed) out << write_canonical(seq) << '\n';
    std::istringstream in(out.str());
    const auto loaded = load_canonical(in);
    const bool exact = !parsed.empty() && loaded == parsed;

    const IdLists ids = default_id_lists("ntu60", Protocol::cross_subject);
    SplitOptions opt;
    opt.validation_fraction = 0.1;
    opt.seed = 9;
    const std::string d1 = split_protocol(parsed, Protocol::cross_subject, ids, opt).digest(parsed);
    const auto reparsed = parse_corpus(fixture_dir / "ntu");
    const std::string d2 = split_protocol(reparsed, Protocol::cross_subject, ids, opt).digest(reparsed);
    r.passed = exact && d1 == d2;
    r.detail = std::to_string(parsed.size()) + " sequences, round trip " + (exact ? "bit-exact" : "MISMATCH") +
               "; manifest digest " + d1.substr(0, 12) + (d1 == d2 ? " reproduced" : " differs on rerun");
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = since(t0);
  return r;
}

// --------------------------------------------------------------- criterion 11

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CriterionResult determinism(const std::filesystem::path& work) {
  CriterionResult r = criterion(11, "deterministic training and checkpoint resume");
  const auto t0 = Clock::now();
  const RunConfig cfg = RunConfig::from_tree(ConfigTree::parse_text(R"(
seed = 21
deterministic = true
precision = "float64"
[model]
num_classes = 4
c1 = 8
c2 = 8
gcn_dims = [8, 8, 8]
c4 = 16
frame_hidden = 8
[train]
epochs = 4
decay_epochs = [3]
batch_size = 4
[data]
source = "synthetic"
synthetic_train_per_class = 3
synthetic_test_per_class = 2
synthetic_min_frames = 20
synthetic_max_frames = 30
)"));
  const PreparedData data = prepare_data(cfg);
  const auto dir_a = work / "run_a";
  const auto dir_b = work / "run_b";
  const auto dir_c = work / "run_c";
  run_training<double>(cfg, data, run_options(dir_a));
  run_training<double>(cfg, data, run_options(dir_b));
  run_training<double>(cfg, data, run_options(dir_c, 2));
  const Checkpoint<double> mid = load_checkpoint<double>(dir_c / "checkpoint.bin");
  run_training<double>(cfg, data, run_options(dir_c), &mid);

  const std::string a = slurp(dir_a / "metrics.csv");
  const bool repeat = !a.empty() && a == slurp(dir_b / "metrics.csv");
  const bool resumed_metrics = a == slurp(dir_c / "metrics.csv");
  const bool resumed_state = slurp(dir_a / "checkpoint.bin") == slurp(dir_c / "checkpoint.bin");
  r.seconds = since(t0);
  r.passed = repeat && resumed_metrics && resumed_state;
  r.detail = std::string("two runs: metrics ") + (repeat ? "byte-identical" : "DIFFER") + "; resume at epoch 2: metrics " +
             (resumed_metrics ? "identical" : "DIFFER") + ", final checkpoint " + (resumed_state ? "identical" : "DIFFERS");
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  auto wanted = [&](int id) { return options.only.empty() || options.only.count(id) != 0; };
  std::vector<CriterionResult> results;
  auto guarded = [&](int id, const std::string& name, auto&& fn) {
    if (!wanted(id)) return;
    if (options.log) *options.log << "criterion " << id << ": " << name << '\n';
    try {
      results.push_back(fn());
    } catch (const std::exception& e) {
      results.push_back({id, name, false, std::string("error: ") + e.what(), 0.0});
    }
  };
  guarded(1, "parameter counts", parameter_counts);
  guarded(2, "gradient check", gradient_check);
  guarded(3, "adjacency normalization", adjacency_normalization);
  guarded(4, "joint permutation", joint_permutation);
  guarded(5, "frame order", frame_order);

  std::unique_ptr<OverfitStudy> study;
  if (wanted(6) || wanted(10)) {
    try {
      if (options.log) *options.log << "training synthetic overfit study\n";
      study = run_overfit_study(options.log);
    } catch (const std::exception& e) {
      for (int id : {6, 10}) {
        if (wanted(id)) results.push_back({id, "synthetic overfit study", false, std::string("error: ") + e.what(), 0.0});
      }
    }
  }
  if (study) guarded(6, "overfit oracle", [&] { return overfit_oracle(*study); });
  guarded(7, "schedule", schedule_table);
  guarded(8, "closed-form losses", closed_form_losses);
  guarded(9, "round trip", [&] { return round_trip(options.fixture_dir); });
  if (study) guarded(10, "smp probe", [&] { return smp_conservation(*study); });
  guarded(11, "determinism", [&] {
    std::filesystem::path work = options.work_dir;
    const bool temporary = work.empty();
    if (temporary) work = std::filesystem::temp_directory_path() / ("sgn_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(work);
    CriterionResult res = determinism(work);
    if (temporary) std::filesystem::remove_all(work);
    return res;
  });
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return results;
}

}  // namespace sgn
