#include "sgn/model/joint_graph.hpp"

#include "sgn/error.hpp"
#include "sgn/numerics/ops.hpp"

namespace sgn {

template <typename T>
GraphConvLayer<T>::GraphConvLayer(std::size_t in_features, std::size_t out_features, T bn_momentum,
                                  T bn_epsilon, std::mt19937_64& rng)
    : transform_(in_features, out_features, false, rng),
      residual_(in_features, out_features, false, rng),
      norm_(out_features, bn_momentum, bn_epsilon) {}

template <typename T>
Tensor<T> GraphConvLayer<T>::forward(const Tensor<T>& z, const Tensor<T>& adjacency) {
  const Shape& s = z.shape();
  const Tensor<T> z3 = reshape(z, {s[0] * s[1], s[2], s[3]});
  const Tensor<T> g3 = reshape(adjacency, {s[0] * s[1], s[2], s[2]});
  Tensor<T> passed = transform_.forward(batched_matmul(g3, z3));
  Tensor<T> pre = add(passed, residual_.forward(z3));
  pre = reshape(pre, {s[0], s[1], s[2], transform_.out_features()});
  return relu(norm_.forward(pre));
}

template <typename T>
void GraphConvLayer<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const {
  transform_.collect(out, prefix + ".w_y");
  residual_.collect(out, prefix + ".w_z");
  norm_.collect(out, prefix + ".bn");
}

namespace {

std::size_t graph_width(const JointGraphConfig& c) { return c.graph_uses_joint_type ? 2 * c.c1 : c.c1; }

}  // namespace

template <typename T>
JointLevelModule<T>::JointLevelModule(const JointGraphConfig& config, std::mt19937_64& rng)
    : config_(config),
      joint_embed_(config.joints, config.c1, config.c1, rng),
      theta_(graph_width(config), config.c2, true, rng),
      phi_(graph_width(config), config.c2, true, rng) {
  if (config.gcn_dims.empty()) throw ConfigError("gcn_dims must list at least one layer");
  std::size_t in = config.passing_uses_joint_type ? 2 * config.c1 : config.c1;
  for (std::size_t out : config.gcn_dims) {
    layers_.emplace_back(in, out, static_cast<T>(config.bn_momentum), static_cast<T>(config.bn_epsilon), rng);
    in = out;
  }
}

template <typename T>
Tensor<T> JointLevelModule<T>::joint_semantics(std::span<const int> joint_types) const {
  if (joint_types.size() != config_.joints) {
    throw DimensionError("joint types list has " + std::to_string(joint_types.size()) + " entries, expected " +
                         std::to_string(config_.joints));
  }
  return joint_embed_.forward(one_hot<T>(joint_types, config_.joints));
}

template <typename T>
Tensor<T> JointLevelModule<T>::concat_semantics(const Tensor<T>& z, const Tensor<T>& semantics) const {
  const Shape& s = z.shape();
  return concat_last(z, broadcast_to(semantics, {s[0], s[1], s[2], semantics.dim(1)}));
}

template <typename T>
Tensor<T> JointLevelModule<T>::build_adjacency(const Tensor<T>& graph_input) const {
  const Shape& s = graph_input.shape();
  const std::size_t frames = s[0] * s[1];
  const Tensor<T> a = reshape(theta_.forward(graph_input), {frames, s[2], config_.c2});
  const Tensor<T> b = reshape(phi_.forward(graph_input), {frames, s[2], config_.c2});
  return reshape(softmax_last(batched_matmul(a, b, true)), {s[0], s[1], s[2], s[2]});
}

template <typename T>
JointLevelOutput<T> JointLevelModule<T>::forward(const Tensor<T>& z, std::span<const int> joint_types) {
  if (z.rank() != 4 || z.dim(2) != config_.joints || z.dim(3) != config_.c1) {
    throw DimensionError("joint-level module: expected [N, T, " + std::to_string(config_.joints) + ", " +
                         std::to_string(config_.c1) + "], got " + shape_str(z.shape()));
  }
  Tensor<T> with_types;
  if (config_.graph_uses_joint_type || config_.passing_uses_joint_type) {
    with_types = concat_semantics(z, joint_semantics(joint_types));
  }
  JointLevelOutput<T> out;
  out.adjacency = build_adjacency(config_.graph_uses_joint_type ? with_types : z);
  Tensor<T> h = config_.passing_uses_joint_type ? with_types : z;
  for (auto& layer : layers_) h = layer.forward(h, out.adjacency);
  out.features = h;
  return out;
}

template <typename T>
void JointLevelModule<T>::set_mode(Mode mode) {
  for (auto& layer : layers_) layer.norm().set_mode(mode);
}

template <typename T>
void JointLevelModule<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const {
  if (config_.graph_uses_joint_type || config_.passing_uses_joint_type) {
    joint_embed_.collect(out, prefix + ".joint_type");
  }
  theta_.collect(out, prefix + ".theta");
  phi_.collect(out, prefix + ".phi");
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i].collect(out, prefix + ".gcn" + std::to_string(i));
}

template class GraphConvLayer<float>;
template class GraphConvLayer<double>;
template class JointLevelModule<float>;
template class JointLevelModule<double>;

}  // namespace sgn
