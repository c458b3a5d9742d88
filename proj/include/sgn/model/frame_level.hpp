#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sgn/model/layers.hpp"
#include "sgn/numerics/batch_norm.hpp"
#include "sgn/numerics/tensor.hpp"

namespace sgn {

struct FrameHeadConfig {
  std::size_t frames = 20;   // T handled by this head
  std::size_t c3 = 256;      // channels entering the head
  std::size_t c4 = 512;
  std::size_t classes = 60;
  std::size_t temporal_kernel = 3;
  std::size_t frame_hidden = 64;
  bool own_frame_index = true;  // false: embedder supplied by the caller (shared) or disabled
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
};

template <typename T>
struct FrameLevelOutput {
  Tensor<T> logits;                  // [N, classes]
  std::vector<std::size_t> smp_argmax;  // winning joint per (n, t, channel), row-major
};

template <typename T>
class FrameLevelHead {
 public:
  FrameLevelHead(const FrameHeadConfig& config, std::mt19937_64& rng);

  // Frame-index embeddings f~_t for t < frames using an embedder of one-hot width
  // `embedder.in_features()`: [frames, C3].
  static Tensor<T> frame_semantics(const EmbedMLP<T>& embedder, std::size_t frames);

  // x: [N, T, J, C3]. `shared_frame_index` is used when the head has no embedder
  // of its own; pass nullptr to run without frame-index semantics.
  FrameLevelOutput<T> forward(const Tensor<T>& x, const EmbedMLP<T>* shared_frame_index);

  const FrameHeadConfig& config() const { return config_; }
  EmbedMLP<T>* frame_index() { return frame_index_ ? &*frame_index_ : nullptr; }
  Tensor<T>& conv_weight() { return conv_weight_; }
  Tensor<T>& conv_bias() { return conv_bias_; }
  BatchNorm<T>& conv_norm() { return conv_norm_; }
  Linear<T>& pointwise() { return pointwise_; }
  BatchNorm<T>& pointwise_norm() { return pointwise_norm_; }
  Linear<T>& classifier() { return classifier_; }
  void set_mode(Mode mode);

  void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const;

 private:
  FrameHeadConfig config_;
  std::optional<EmbedMLP<T>> frame_index_;
  Tensor<T> conv_weight_;  // [C3, C3, K]
  Tensor<T> conv_bias_;
  BatchNorm<T> conv_norm_;
  Linear<T> pointwise_;
  BatchNorm<T> pointwise_norm_;
  Linear<T> classifier_;
};

struct SmpProbe {
  std::vector<std::size_t> counts;  // per joint slot
  std::vector<std::size_t> top5;    // by count, ties to the lower index
  std::size_t total() const;
};

// Counts how often each joint wins the spatial max over all (frame, channel)
// pairs of one sample. `argmax` holds frames * channels entries.
SmpProbe smp_probe(std::span<const std::size_t> argmax, std::size_t joints);

}  // namespace sgn
