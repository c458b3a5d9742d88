#include "sgn/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "sgn/error.hpp"
#include "sgn/numerics/ops.hpp"

namespace sgn {

void ModelConfig::validate() const {
  if (scales.empty()) throw ConfigError("scales must list at least one clip count");
  std::set<std::size_t> seen;
  for (std::size_t s : scales) {
    if (s == 0) throw ConfigError("scales must be positive");
    if (!seen.insert(s).second) throw ConfigError("scales must be distinct, " + std::to_string(s) + " repeats");
  }
  if (num_classes == 0) throw ConfigError("num_classes must be positive");
  if (num_joints == 0) throw ConfigError("num_joints must be positive");
  if (c1 == 0 || c2 == 0 || c4 == 0 || frame_hidden == 0) throw ConfigError("layer widths must be positive");
  if (gcn_dims.empty()) throw ConfigError("gcn_dims must list at least one layer");
  if (temporal_kernel % 2 == 0) throw ConfigError("temporal kernel must be odd");
  partition_for(movement, num_joints);
}

std::size_t ModelConfig::frame_index_width() const { return *std::max_element(scales.begin(), scales.end()); }

ModelConfig ModelConfig::ss_sgn(std::size_t classes) {
  ModelConfig c;
  c.scales = {20};
  c.num_classes = classes;
  return c;
}

ModelConfig ModelConfig::ms_sgn(std::size_t classes) {
  ModelConfig c;
  c.num_classes = classes;
  return c;
}

ModelConfig ModelConfig::ms_sgn_separate(std::size_t classes) {
  ModelConfig c = ms_sgn(classes);
  c.share_trunk = false;
  c.share_frame_index = false;
  return c;
}

JointLayout JointLayout::identity(std::size_t joints, MovementPreset preset) {
  JointLayout layout;
  layout.joint_types.resize(joints);
  std::iota(layout.joint_types.begin(), layout.joint_types.end(), 0);
  layout.partition = partition_for(preset, joints);
  return layout;
}

JointLayout permute_layout(const JointLayout& layout, std::span<const std::size_t> perm) {
  const std::size_t n = layout.joint_types.size();
  if (perm.size() != n) throw DimensionError("permutation length differs from joint count");
  std::vector<std::size_t> inverse(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] >= n || inverse[perm[i]] != n) throw ConfigError("not a permutation");
    inverse[perm[i]] = i;
  }
  JointLayout out;
  out.joint_types.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.joint_types[i] = layout.joint_types[perm[i]];
  if (layout.partition) {
    BodyPartition p;
    p.part_of_joint.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.part_of_joint[i] = layout.partition->part_of_joint[perm[i]];
    for (int r : layout.partition->reference_of_part) p.reference_of_part.push_back(static_cast<int>(inverse[r]));
    out.partition = std::move(p);
  }
  return out;
}

template <typename T>
SGNModel<T>::SGNModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  layout_ = JointLayout::identity(config_.num_joints, config_.movement);
  std::mt19937_64 rng(config_.init_seed);

  DynamicsConfig dyn{config_.c1, config_.velocity, config_.movement};
  JointGraphConfig jg;
  jg.joints = config_.num_joints;
  jg.c1 = config_.c1;
  jg.c2 = config_.c2;
  jg.gcn_dims = config_.gcn_dims;
  jg.graph_uses_joint_type = config_.graph_uses_joint_type;
  jg.passing_uses_joint_type = config_.passing_uses_joint_type;
  jg.bn_momentum = config_.bn_momentum;
  jg.bn_epsilon = config_.bn_epsilon;
  const std::size_t n_trunks = config_.share_trunk ? 1 : config_.scales.size();
  trunks_.reserve(n_trunks);
  for (std::size_t t = 0; t < n_trunks; ++t) {
    DynamicsRepresentation<T> d(dyn, rng);
    JointLevelModule<T> j(jg, rng);
    trunks_.push_back(Trunk{std::move(d), std::move(j)});
  }

  const std::size_t c3 = config_.gcn_dims.back();
  if (config_.frame_index && config_.share_frame_index) {
    frame_index_.emplace(config_.frame_index_width(), config_.frame_hidden, c3, rng);
  }
  for (std::size_t s : config_.scales) {
    FrameHeadConfig fh;
    fh.frames = s;
    fh.c3 = c3;
    fh.c4 = config_.c4;
    fh.classes = config_.num_classes;
    fh.temporal_kernel = config_.temporal_kernel;
    fh.frame_hidden = config_.frame_hidden;
    fh.own_frame_index = config_.frame_index && !config_.share_frame_index;
    fh.bn_momentum = config_.bn_momentum;
    fh.bn_epsilon = config_.bn_epsilon;
    heads_.emplace_back(fh, rng);
  }
}

template <typename T>
std::size_t SGNModel<T>::scale_index(std::size_t frames) const {
  for (std::size_t i = 0; i < config_.scales.size(); ++i) {
    if (config_.scales[i] == frames) return i;
  }
  throw ConfigError("no frame-level head for T=" + std::to_string(frames));
}

template <typename T>
ScaleOutput<T> SGNModel<T>::forward_scale(const Tensor<T>& coords, std::size_t scale) {
  if (scale >= heads_.size()) throw ConfigError("scale index " + std::to_string(scale) + " out of range");
  if (coords.rank() != 4 || coords.dim(2) != config_.num_joints || coords.dim(3) != 3) {
    throw DimensionError("model input must be [N, T, " + std::to_string(config_.num_joints) + ", 3], got " +
                         shape_str(coords.shape()));
  }
  if (coords.dim(1) != config_.scales[scale]) {
    throw ConfigError("scale " + std::to_string(config_.scales[scale]) + " received T=" +
                      std::to_string(coords.dim(1)));
  }
  Trunk& trunk = trunks_[trunk_of(scale)];
  const BodyPartition* partition = layout_.partition ? &*layout_.partition : nullptr;
  Tensor<T> z = trunk.dynamics.forward(coords, partition);
  JointLevelOutput<T> jl = trunk.joint_level.forward(z, layout_.joint_types);
  FrameLevelOutput<T> fl = heads_[scale].forward(jl.features, frame_index_ ? &*frame_index_ : nullptr);
  return {fl.logits, jl.adjacency, std::move(fl.smp_argmax)};
}

template <typename T>
std::vector<Tensor<T>> SGNModel<T>::ms_forward(std::span<const Tensor<T>> views) {
  if (views.size() != heads_.size()) {
    throw ConfigError("expected " + std::to_string(heads_.size()) + " views, got " + std::to_string(views.size()));
  }
  std::vector<Tensor<T>> out;
  for (std::size_t s = 0; s < views.size(); ++s) out.push_back(forward_scale(views[s], s).logits);
  return out;
}

template <typename T>
void SGNModel<T>::set_mode(Mode mode) {
  mode_ = mode;
  for (auto& t : trunks_) t.joint_level.set_mode(mode);
  for (auto& h : heads_) h.set_mode(mode);
}

template <typename T>
void SGNModel<T>::set_layout(JointLayout layout) {
  if (layout.joint_types.size() != config_.num_joints) throw ConfigError("layout joint count mismatch");
  if (config_.movement != MovementPreset::none) {
    if (!layout.partition) throw ConfigError("layout needs a body partition for the movement branches");
    layout.partition->validate(config_.num_joints);
  }
  layout_ = std::move(layout);
}

template <typename T>
std::string SGNModel<T>::trunk_name(std::size_t t) const {
  return config_.share_trunk ? std::string("trunk") : "trunk" + std::to_string(config_.scales[t]);
}

template <typename T>
std::vector<NamedTensor<T>> SGNModel<T>::state() const {
  std::vector<NamedTensor<T>> out;
  for (std::size_t t = 0; t < trunks_.size(); ++t) {
    trunks_[t].dynamics.collect(out, trunk_name(t) + ".dr");
    trunks_[t].joint_level.collect(out, trunk_name(t) + ".jl");
  }
  if (frame_index_) frame_index_->collect(out, "frame_index");
  for (std::size_t s = 0; s < heads_.size(); ++s) heads_[s].collect(out, "head" + std::to_string(config_.scales[s]));
  return out;
}

template <typename T>
std::vector<Tensor<T>> SGNModel<T>::trainable_tensors() const {
  std::vector<Tensor<T>> out;
  for (auto& nt : state()) {
    if (nt.trainable) out.push_back(nt.tensor);
  }
  return out;
}

template <typename T>
std::size_t SGNModel<T>::parameter_count() const {
  std::size_t total = 0;
  for (auto& nt : state()) {
    if (nt.trainable) total += nt.tensor.numel();
  }
  return total;
}

template <typename T>
std::map<std::string, std::size_t> SGNModel<T>::parameter_breakdown() const {
  std::map<std::string, std::size_t> out;
  for (auto& nt : state()) {
    if (!nt.trainable) continue;
    // Two levels: "trunk.dr", "trunk.jl", "head20", "frame_index".
    std::string key = nt.name.substr(0, nt.name.find('.'));
    if (key.rfind("trunk", 0) == 0) {
      const auto second = nt.name.find('.', key.size() + 1);
      key = nt.name.substr(0, second);
    }
    out[key] += nt.tensor.numel();
  }
  return out;
}

template <typename T>
void SGNModel<T>::load_state(std::span<const NamedTensor<T>> source) {
  auto mine = state();
  for (const auto& src : source) {
    auto it = std::find_if(mine.begin(), mine.end(), [&](const NamedTensor<T>& t) { return t.name == src.name; });
    if (it == mine.end()) throw SchemaError("unknown tensor '" + src.name + "' for this model configuration");
    if (it->tensor.shape() != src.tensor.shape()) {
      throw SchemaError("tensor '" + src.name + "' has shape " + shape_str(src.tensor.shape()) + ", model expects " +
                        shape_str(it->tensor.shape()));
    }
    auto dst = it->tensor.mutable_values();
    std::copy(src.tensor.values().begin(), src.tensor.values().end(), dst.begin());
  }
}

template <typename T>
Tensor<T> multi_scale_loss(std::span<const Tensor<T>> logits, std::span<const int> labels, T epsilon) {
  std::vector<Tensor<T>> terms;
  for (const auto& l : logits) terms.push_back(cross_entropy_label_smoothed(l, labels, epsilon));
  return add_all<T>(terms);
}

template <typename T>
std::vector<std::vector<double>> softmax_scores(const Tensor<T>& logits) {
  const std::size_t n = logits.dim(0);
  const std::size_t k = logits.dim(1);
  std::vector<std::vector<double>> out(n, std::vector<double>(k));
  for (std::size_t r = 0; r < n; ++r) {
    auto row = logits.values().subspan(r * k, k);
    const double mx = static_cast<double>(*std::max_element(row.begin(), row.end()));
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += out[r][j] = std::exp(static_cast<double>(row[j]) - mx);
    for (auto& v : out[r]) v /= z;
  }
  return out;
}

std::vector<double> fuse_scores(std::span<const std::vector<double>> scores) {
  if (scores.empty()) throw DimensionError("fuse_scores: no score vectors");
  std::vector<double> mean(scores.front().size(), 0.0);
  for (const auto& s : scores) {
    if (s.size() != mean.size()) throw DimensionError("fuse_scores: score vectors differ in length");
    for (std::size_t i = 0; i < s.size(); ++i) mean[i] += s[i];
  }
  for (auto& v : mean) v /= static_cast<double>(scores.size());
  return mean;
}

std::size_t predict(std::span<const double> scores) {
  if (scores.empty()) throw DimensionError("predict: empty score vector");
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

template class SGNModel<float>;
template class SGNModel<double>;
template Tensor<float> multi_scale_loss(std::span<const Tensor<float>>, std::span<const int>, float);
template Tensor<double> multi_scale_loss(std::span<const Tensor<double>>, std::span<const int>, double);
template std::vector<std::vector<double>> softmax_scores(const Tensor<float>&);
template std::vector<std::vector<double>> softmax_scores(const Tensor<double>&);

}  // namespace sgn
