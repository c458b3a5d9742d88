#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgn/model/dynamics.hpp"
#include "sgn/model/frame_level.hpp"
#include "sgn/model/joint_graph.hpp"
#include "sgn/numerics/batch_norm.hpp"
#include "sgn/numerics/tensor.hpp"

namespace sgn {

struct ModelConfig {
  std::vector<std::size_t> scales{15, 20, 25};
  std::size_t num_classes = 60;
  std::size_t num_joints = 25;
  std::size_t c1 = 64;
  std::size_t c2 = 256;
  std::vector<std::size_t> gcn_dims{128, 256, 256};
  std::size_t c4 = 512;
  std::size_t frame_hidden = 64;
  std::size_t temporal_kernel = 3;
  bool frame_index = true;
  bool share_frame_index = true;  // one frame-index embedder of width max(scales) for all heads
  bool share_trunk = true;        // false: one DR + JL per scale
  bool velocity = true;
  MovementPreset movement = MovementPreset::fine5;
  bool graph_uses_joint_type = true;
  bool passing_uses_joint_type = true;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
  std::uint64_t init_seed = 0;

  void validate() const;
  std::size_t frame_index_width() const;

  static ModelConfig ss_sgn(std::size_t classes);
  static ModelConfig ms_sgn(std::size_t classes);
  // Every module per scale, nothing shared.
  static ModelConfig ms_sgn_separate(std::size_t classes);
};

// Which joint type sits in each input slot, and the body partition over slots.
struct JointLayout {
  std::vector<int> joint_types;
  std::optional<BodyPartition> partition;

  static JointLayout identity(std::size_t joints, MovementPreset preset);
};

// Layout seen after reordering input slots so that new slot i holds old slot perm[i].
JointLayout permute_layout(const JointLayout& layout, std::span<const std::size_t> perm);

template <typename T>
struct ScaleOutput {
  Tensor<T> logits;
  Tensor<T> adjacency;
  std::vector<std::size_t> smp_argmax;
};

template <typename T>
class SGNModel {
 public:
  explicit SGNModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  std::size_t num_scales() const { return config_.scales.size(); }
  std::size_t scale_index(std::size_t frames) const;

  // coords: [N, T, J, 3] with T = scales[scale].
  ScaleOutput<T> forward_scale(const Tensor<T>& coords, std::size_t scale);
  Tensor<T> logits(const Tensor<T>& coords, std::size_t scale) { return forward_scale(coords, scale).logits; }
  // One view per scale, in scale order.
  std::vector<Tensor<T>> ms_forward(std::span<const Tensor<T>> views);

  void set_mode(Mode mode);
  Mode mode() const { return mode_; }

  const JointLayout& layout() const { return layout_; }
  void set_layout(JointLayout layout);

  // Every tensor of the model in deterministic order; BN running statistics are
  // included with trainable = false.
  std::vector<NamedTensor<T>> state() const;
  std::vector<Tensor<T>> trainable_tensors() const;
  std::size_t parameter_count() const;
  // Trainable parameter count per top-level module name ("trunk", "head20", ...).
  std::map<std::string, std::size_t> parameter_breakdown() const;

  // Copies values by name; every name in `source` must exist here with the same shape.
  void load_state(std::span<const NamedTensor<T>> source);

  DynamicsRepresentation<T>& dynamics(std::size_t scale = 0) { return trunks_[trunk_of(scale)].dynamics; }
  JointLevelModule<T>& joint_level(std::size_t scale = 0) { return trunks_[trunk_of(scale)].joint_level; }
  FrameLevelHead<T>& head(std::size_t scale) { return heads_.at(scale); }
  EmbedMLP<T>* shared_frame_index() { return frame_index_ ? &*frame_index_ : nullptr; }

 private:
  struct Trunk {
    DynamicsRepresentation<T> dynamics;
    JointLevelModule<T> joint_level;
  };
  std::size_t trunk_of(std::size_t scale) const { return config_.share_trunk ? 0 : scale; }
  std::string trunk_name(std::size_t t) const;

  ModelConfig config_;
  JointLayout layout_;
  std::vector<Trunk> trunks_;
  std::optional<EmbedMLP<T>> frame_index_;
  std::vector<FrameLevelHead<T>> heads_;
  Mode mode_ = Mode::train;
};

// Sum over scales of the label-smoothed cross entropy.
template <typename T>
Tensor<T> multi_scale_loss(std::span<const Tensor<T>> logits, std::span<const int> labels, T epsilon);

// Row-wise softmax of logits [N, K] as plain probability vectors.
template <typename T>
std::vector<std::vector<double>> softmax_scores(const Tensor<T>& logits);

// Arithmetic mean of equal-length score vectors.
std::vector<double> fuse_scores(std::span<const std::vector<double>> scores);

// Argmax with ties to the lowest index.
std::size_t predict(std::span<const double> scores);

}  // namespace sgn
