#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgn/io/skeleton.hpp"
#include "sgn/model/model.hpp"
#include "sgn/numerics/adam.hpp"
#include "sgn/preprocess/preprocess.hpp"

namespace sgn {

struct TrainConfig {
  std::size_t epochs = 120;
  double lr = 0.001;
  std::vector<std::size_t> decay_epochs{60, 90, 110};
  double decay_factor = 0.1;
  double weight_decay = 1e-4;
  std::size_t batch_size = 64;
  double label_smoothing = 0.1;
  std::uint64_t seed = 0;
  AugmentConfig augment;
  std::size_t validate_every = 1;  // 0 disables validation
  std::size_t eval_views = 5;
  std::size_t checkpoint_every = 0;

  void validate() const;
};

// Piecewise-constant step decay: lr * factor^(number of decay epochs <= epoch).
double lr_at(std::size_t epoch, const TrainConfig& cfg);

struct MetricsRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> val_accuracy;
  double lr = 0.0;
  double seconds = 0.0;
};

std::string metrics_header();
std::string metrics_line(const MetricsRow& row);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

// Stacks equally sized sequences into [B, T, J, 3].
template <typename T>
Tensor<T> stack_coords(std::span<const SkeletonSequence> samples);

template <typename T>
class Trainer {
 public:
  Trainer(SGNModel<T>& model, const TrainConfig& config);

  // One pass over `train` (indices into `records`) at epoch `epoch` (1-based).
  // Records are expected to be translated already. Deterministic given the seed.
  MetricsRow train_epoch(std::span<const SkeletonSequence> records, std::span<const std::size_t> train,
                         std::size_t epoch);

  AdamState<T>& optimizer() { return adam_; }
  const TrainConfig& config() const { return config_; }

 private:
  SGNModel<T>& model_;
  TrainConfig config_;
  AdamState<T> adam_;
};

struct EvalOptions {
  std::size_t views = 5;
  SamplingMode mode = SamplingMode::random;
  std::uint64_t seed = 0;
  std::size_t batch_size = 64;
};

struct EvalResult {
  double accuracy = 0.0;                    // over source clips
  std::vector<double> per_class_accuracy;   // NaN for classes absent from the split
  std::vector<std::size_t> class_support;
  std::vector<std::string> sources;         // one entry per source clip, first-appearance order
  std::vector<int> labels;
  std::vector<std::size_t> predictions;
  std::vector<std::vector<double>> scores;  // fused per source
  std::vector<std::vector<double>> record_scores;  // fused per record (scales x views)
};

// Every record is scored at every scale with `views` clip samplings each; the
// scale x view softmax scores are averaged, then averaged again over the bodies
// of one source clip before the argmax. Runs the model in eval mode and restores
// the previous mode afterwards.
template <typename T>
EvalResult evaluate(SGNModel<T>& model, std::span<const SkeletonSequence> records,
                    std::span<const std::size_t> indices, const EvalOptions& options);

struct ClassGain {
  std::size_t class_id = 0;
  double accuracy_a = 0.0;
  double accuracy_b = 0.0;
  double delta = 0.0;  // a - b
};

// Per-class deltas sorted descending (ties by class id). Classes with no
// support in either run are skipped.
std::vector<ClassGain> compare_runs(const EvalResult& a, const EvalResult& b);
std::string class_gain_csv(std::span<const ClassGain> gains);

// class_id,class_name,accuracy
std::string per_class_csv(const EvalResult& result, std::span<const std::string> class_names = {});

std::string format_double(double v);

}  // namespace sgn
