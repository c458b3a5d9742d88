#include "sgn/train/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "sgn/error.hpp"
#include "sgn/numerics/ops.hpp"
#include "sgn/util.hpp"

namespace sgn {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (!(lr >= 0.0)) throw ConfigError("learning rate must be non-negative");
  for (std::size_t i = 0; i < decay_epochs.size(); ++i) {
    if (i > 0 && decay_epochs[i] <= decay_epochs[i - 1]) throw ConfigError("decay epochs must be strictly increasing");
    if (decay_epochs[i] >= epochs) throw ConfigError("decay epoch " + std::to_string(decay_epochs[i]) + " is not below epochs");
  }
  if (batch_size < 2) throw ConfigError("batch size must be at least 2 (batch normalization)");
  if (label_smoothing < 0.0 || label_smoothing >= 1.0) throw ConfigError("label smoothing must lie in [0, 1)");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (eval_views == 0) throw ConfigError("eval_views must be positive");
  augment.validate();
}

double lr_at(std::size_t epoch, const TrainConfig& cfg) {
  const auto k = std::count_if(cfg.decay_epochs.begin(), cfg.decay_epochs.end(),
                               [&](std::size_t d) { return d <= epoch; });
  // Dividing by (1/factor)^k keeps 0.001 -> 1e-4 -> 1e-5 -> 1e-6 free of drift.
  return cfg.lr / std::pow(1.0 / cfg.decay_factor, static_cast<double>(k));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string metrics_header() { return "epoch,train_loss,train_accuracy,val_accuracy,lr,seconds"; }

std::string metrics_line(const MetricsRow& row) {
  return std::to_string(row.epoch) + ',' + format_double(row.train_loss) + ',' + format_double(row.train_accuracy) +
         ',' + (row.val_accuracy ? format_double(*row.val_accuracy) : std::string()) + ',' + format_double(row.lr) +
         ',' + format_double(row.seconds);
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::vector<MetricsRow> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == metrics_header()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw DataError("metrics line has " + std::to_string(f.size()) + " fields: " + line);
    MetricsRow r;
    r.epoch = std::stoul(f[0]);
    r.train_loss = std::stod(f[1]);
    r.train_accuracy = std::stod(f[2]);
    if (!f[3].empty()) r.val_accuracy = std::stod(f[3]);
    r.lr = std::stod(f[4]);
    r.seconds = std::stod(f[5]);
    rows.push_back(r);
  }
  return rows;
}

template <typename T>
Tensor<T> stack_coords(std::span<const SkeletonSequence> samples) {
  if (samples.empty()) throw DimensionError("stack_coords: empty batch");
  const std::size_t frames = samples.front().frames;
  const std::size_t joints = samples.front().joints;
  std::vector<T> values;
  values.reserve(samples.size() * frames * joints * 3);
  for (const auto& s : samples) {
    if (s.frames != frames || s.joints != joints) throw DimensionError("stack_coords: samples differ in size");
    for (float c : s.coords) values.push_back(static_cast<T>(c));
  }
  return Tensor<T>({samples.size(), frames, joints, 3}, std::move(values));
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order, std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
  }
  // A lone trailing sample cannot be batch-normalized; fold it into the previous batch.
  if (batches.size() > 1 && batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back().front());
    batches.pop_back();
  }
  return batches;
}

}  // namespace

template <typename T>
Trainer<T>::Trainer(SGNModel<T>& model, const TrainConfig& config) : model_(model), config_(config) {
  config_.validate();
  adam_.weight_decay = static_cast<T>(config_.weight_decay);
}

template <typename T>
MetricsRow Trainer<T>::train_epoch(std::span<const SkeletonSequence> records, std::span<const std::size_t> train,
                                   std::size_t epoch) {
  if (train.empty()) throw DataError("training split is empty");
  const auto start = std::chrono::steady_clock::now();
  model_.set_mode(Mode::train);
  const auto& scales = model_.config().scales;

  std::vector<std::size_t> order(train.begin(), train.end());
  std::mt19937_64 rng(derive_seed(config_.seed, {epoch, 0x73687566}));
  std::shuffle(order.begin(), order.end(), rng);
  const auto batches = make_batches(std::move(order), config_.batch_size);

  std::vector<Tensor<T>> params = model_.trainable_tensors();
  adam_.learning_rate = static_cast<T>(lr_at(epoch, config_));
  adam_.weight_decay = static_cast<T>(config_.weight_decay);

  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::size_t seen = 0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& batch = batches[b];
    std::vector<SkeletonSequence> rotated;
    std::vector<int> labels;
    for (std::size_t r : batch) {
      if (records[r].label < 0 || static_cast<std::size_t>(records[r].label) >= model_.config().num_classes) {
        throw DataError("record " + std::to_string(r) + " has label " + std::to_string(records[r].label) +
                        " outside [0, " + std::to_string(model_.config().num_classes) + ")");
      }
      rotated.push_back(rotate_augment(records[r], config_.augment, derive_seed(config_.seed, {epoch, r, 1})));
      labels.push_back(records[r].label);
    }
    std::vector<Tensor<T>> views;
    for (std::size_t s = 0; s < scales.size(); ++s) {
      std::vector<SkeletonSequence> sampled;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        sampled.push_back(sample_clips(rotated[i], scales[s], SamplingMode::random,
                                       derive_seed(config_.seed, {epoch, batch[i], 2, s})));
      }
      views.push_back(stack_coords<T>(sampled));
    }

    for (auto& p : params) p.zero_grad();
    const std::vector<Tensor<T>> logits = model_.ms_forward(views);
    const Tensor<T> loss = multi_scale_loss<T>(logits, labels, static_cast<T>(config_.label_smoothing));
    if (!std::isfinite(static_cast<double>(loss.item()))) {
      std::string ids;
      for (std::size_t r : batch) ids += (ids.empty() ? "" : ",") + std::to_string(r) + "(" + records[r].source + ")";
      throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) +
                         "; records " + ids);
    }
    loss.backward();
    adam_step<T>(params, adam_);

    loss_sum += static_cast<double>(loss.item()) * static_cast<double>(batch.size());
    std::vector<std::vector<std::vector<double>>> per_scale;
    for (const auto& l : logits) per_scale.push_back(softmax_scores(l));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      std::vector<std::vector<double>> scores;
      for (const auto& ps : per_scale) scores.push_back(ps[i]);
      if (predict(fuse_scores(scores)) == static_cast<std::size_t>(labels[i])) ++correct;
    }
    seen += batch.size();
  }

  MetricsRow row;
  row.epoch = epoch;
  row.train_loss = loss_sum / static_cast<double>(seen);
  row.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
  row.lr = lr_at(epoch, config_);
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

template <typename T>
EvalResult evaluate(SGNModel<T>& model, std::span<const SkeletonSequence> records,
                    std::span<const std::size_t> indices, const EvalOptions& options) {
  if (indices.empty()) throw DataError("evaluation split is empty");
  if (options.views == 0 || options.batch_size == 0) throw ConfigError("evaluation needs views and batch size > 0");
  const Mode previous = model.mode();
  model.set_mode(Mode::eval);
  NoGradGuard no_grad;
  const auto& scales = model.config().scales;
  const std::size_t classes = model.config().num_classes;

  EvalResult result;
  result.record_scores.assign(indices.size(), std::vector<double>(classes, 0.0));
  for (std::size_t start = 0; start < indices.size(); start += options.batch_size) {
    const std::size_t end = std::min(indices.size(), start + options.batch_size);
    for (std::size_t s = 0; s < scales.size(); ++s) {
      for (std::size_t v = 0; v < options.views; ++v) {
        std::vector<SkeletonSequence> sampled;
        for (std::size_t i = start; i < end; ++i) {
          const auto& rec = records[indices[i]];
          // Seeded by content identity, so a duplicated record draws the same views.
          const std::uint64_t seed = derive_seed(
              options.seed, {fnv1a(rec.dataset + '/' + rec.source), static_cast<std::uint64_t>(rec.body_id), s, v});
          sampled.push_back(sample_clips(rec, scales[s], options.mode, seed));
        }
        const auto scores = softmax_scores(model.logits(stack_coords<T>(sampled), s));
        for (std::size_t i = start; i < end; ++i) {
          for (std::size_t k = 0; k < classes; ++k) result.record_scores[i][k] += scores[i - start][k];
        }
      }
    }
  }
  const double denom = static_cast<double>(scales.size() * options.views);
  for (auto& row : result.record_scores) {
    for (auto& x : row) x /= denom;
  }

  std::map<std::string, std::size_t> group_of;
  std::vector<std::vector<std::vector<double>>> members;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& rec = records[indices[i]];
    const std::string key = rec.source.empty() ? "#" + std::to_string(indices[i]) : rec.dataset + '/' + rec.source;
    auto [it, inserted] = group_of.emplace(key, result.sources.size());
    if (inserted) {
      result.sources.push_back(key);
      result.labels.push_back(rec.label);
      members.emplace_back();
    }
    members[it->second].push_back(result.record_scores[i]);
  }

  result.class_support.assign(classes, 0);
  std::vector<std::size_t> class_correct(classes, 0);
  std::size_t correct = 0;
  for (std::size_t g = 0; g < members.size(); ++g) {
    result.scores.push_back(fuse_scores(members[g]));
    result.predictions.push_back(predict(result.scores.back()));
    const int label = result.labels[g];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw DataError("source '" + result.sources[g] + "' has label " + std::to_string(label) + " outside the model's classes");
    }
    ++result.class_support[label];
    if (result.predictions.back() == static_cast<std::size_t>(label)) {
      ++correct;
      ++class_correct[label];
    }
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(members.size());
  result.per_class_accuracy.resize(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    result.per_class_accuracy[k] = result.class_support[k] == 0
                                       ? std::numeric_limits<double>::quiet_NaN()
                                       : static_cast<double>(class_correct[k]) / static_cast<double>(result.class_support[k]);
  }
  model.set_mode(previous);
  return result;
}

std::vector<ClassGain> compare_runs(const EvalResult& a, const EvalResult& b) {
  if (a.per_class_accuracy.size() != b.per_class_accuracy.size()) {
    throw DimensionError("compare_runs: runs have different class sets");
  }
  std::vector<ClassGain> gains;
  for (std::size_t k = 0; k < a.per_class_accuracy.size(); ++k) {
    if (a.class_support[k] == 0 || b.class_support[k] == 0) continue;
    gains.push_back({k, a.per_class_accuracy[k], b.per_class_accuracy[k], a.per_class_accuracy[k] - b.per_class_accuracy[k]});
  }
  std::stable_sort(gains.begin(), gains.end(), [](const ClassGain& x, const ClassGain& y) { return x.delta > y.delta; });
  return gains;
}

std::string class_gain_csv(std::span<const ClassGain> gains) {
  std::string out = "class_id,accuracy_a,accuracy_b,delta\n";
  for (const auto& g : gains) {
    out += std::to_string(g.class_id) + ',' + format_double(g.accuracy_a) + ',' + format_double(g.accuracy_b) + ',' +
           format_double(g.delta) + '\n';
  }
  return out;
}

std::string per_class_csv(const EvalResult& result, std::span<const std::string> class_names) {
  std::string out = "class_id,class_name,accuracy\n";
  for (std::size_t k = 0; k < result.per_class_accuracy.size(); ++k) {
    if (result.class_support[k] == 0) continue;
    const std::string name = k < class_names.size() ? class_names[k] : "class" + std::to_string(k);
    out += std::to_string(k) + ',' + name + ',' + format_double(result.per_class_accuracy[k]) + '\n';
  }
  return out;
}

template Tensor<float> stack_coords(std::span<const SkeletonSequence>);
template Tensor<double> stack_coords(std::span<const SkeletonSequence>);
template class Trainer<float>;
template class Trainer<double>;
template EvalResult evaluate(SGNModel<float>&, std::span<const SkeletonSequence>, std::span<const std::size_t>,
                             const EvalOptions&);
template EvalResult evaluate(SGNModel<double>&, std::span<const SkeletonSequence>, std::span<const std::size_t>,
                             const EvalOptions&);

}  // namespace sgn
