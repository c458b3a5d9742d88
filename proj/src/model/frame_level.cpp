#include "sgn/model/frame_level.hpp"

#include <algorithm>
#include <numeric>

#include "sgn/error.hpp"
#include "sgn/numerics/ops.hpp"

namespace sgn {

template <typename T>
FrameLevelHead<T>::FrameLevelHead(const FrameHeadConfig& config, std::mt19937_64& rng)
    : config_(config),
      conv_norm_(config.c3, static_cast<T>(config.bn_momentum), static_cast<T>(config.bn_epsilon)),
      pointwise_(config.c3, config.c4, true, rng),
      pointwise_norm_(config.c4, static_cast<T>(config.bn_momentum), static_cast<T>(config.bn_epsilon)),
      classifier_(config.c4, config.classes, true, rng) {
  if (config.temporal_kernel % 2 == 0) {
    throw ConfigError("temporal kernel must be odd, got " + std::to_string(config.temporal_kernel));
  }
  if (config.own_frame_index) frame_index_.emplace(config.frames, config.frame_hidden, config.c3, rng);
  const std::size_t fan_in = config.c3 * config.temporal_kernel;
  conv_weight_ = uniform_init<T>({config.c3, config.c3, config.temporal_kernel}, fan_in, rng);
  conv_bias_ = uniform_init<T>({config.c3}, fan_in, rng);
}

template <typename T>
Tensor<T> FrameLevelHead<T>::frame_semantics(const EmbedMLP<T>& embedder, std::size_t frames) {
  if (frames > embedder.in_features()) {
    throw ConfigError("frame-index embedding covers " + std::to_string(embedder.in_features()) +
                      " frames, input has " + std::to_string(frames));
  }
  std::vector<int> idx(frames);
  std::iota(idx.begin(), idx.end(), 0);
  return embedder.forward(one_hot<T>(idx, embedder.in_features()));
}

template <typename T>
FrameLevelOutput<T> FrameLevelHead<T>::forward(const Tensor<T>& x, const EmbedMLP<T>* shared_frame_index) {
  if (x.rank() != 4 || x.dim(3) != config_.c3) {
    throw DimensionError("frame-level head: expected [N, T, J, " + std::to_string(config_.c3) + "], got " +
                         shape_str(x.shape()));
  }
  const std::size_t n = x.dim(0);
  const std::size_t frames = x.dim(1);
  if (frames != config_.frames) {
    throw ConfigError("frame-level head built for T=" + std::to_string(config_.frames) + " received T=" +
                      std::to_string(frames));
  }
  const EmbedMLP<T>* embedder = frame_index_ ? &*frame_index_ : shared_frame_index;
  Tensor<T> h = x;
  if (embedder != nullptr) {
    h = add(h, reshape(frame_semantics(*embedder, frames), {frames, 1, config_.c3}));
  }
  PoolResult<T> smp = max_pool(h, 2);
  h = reshape(smp.output, {n, frames, config_.c3});
  h = relu(conv_norm_.forward(temporal_conv(h, conv_weight_, conv_bias_)));
  h = relu(pointwise_norm_.forward(pointwise_.forward(h)));
  PoolResult<T> tmp = max_pool(h, 1);
  FrameLevelOutput<T> out;
  out.logits = classifier_.forward(reshape(tmp.output, {n, config_.c4}));
  out.smp_argmax = std::move(smp.argmax);
  return out;
}

template <typename T>
void FrameLevelHead<T>::set_mode(Mode mode) {
  conv_norm_.set_mode(mode);
  pointwise_norm_.set_mode(mode);
}

template <typename T>
void FrameLevelHead<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const {
  if (frame_index_) frame_index_->collect(out, prefix + ".frame_index");
  out.push_back({prefix + ".tconv.weight", conv_weight_, true});
  out.push_back({prefix + ".tconv.bias", conv_bias_, true});
  conv_norm_.collect(out, prefix + ".tconv.bn");
  pointwise_.collect(out, prefix + ".pointwise");
  pointwise_norm_.collect(out, prefix + ".pointwise.bn");
  classifier_.collect(out, prefix + ".classifier");
}

std::size_t SmpProbe::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

SmpProbe smp_probe(std::span<const std::size_t> argmax, std::size_t joints) {
  SmpProbe probe;
  probe.counts.assign(joints, 0);
  for (std::size_t j : argmax) {
    if (j >= joints) throw DimensionError("smp probe: joint index " + std::to_string(j) + " out of range");
    ++probe.counts[j];
  }
  std::vector<std::size_t> order(joints);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probe.counts[a] > probe.counts[b]; });
  order.resize(std::min<std::size_t>(5, joints));
  probe.top5 = std::move(order);
  return probe;
}

template class FrameLevelHead<float>;
template class FrameLevelHead<double>;

}  // namespace sgn
