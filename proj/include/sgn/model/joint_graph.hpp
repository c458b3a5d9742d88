#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sgn/model/layers.hpp"
#include "sgn/numerics/batch_norm.hpp"
#include "sgn/numerics/tensor.hpp"

namespace sgn {

struct JointGraphConfig {
  std::size_t joints = 25;  // d_j, one-hot width of the joint type
  std::size_t c1 = 64;
  std::size_t c2 = 256;
  std::vector<std::size_t> gcn_dims{128, 256, 256};
  bool graph_uses_joint_type = true;
  bool passing_uses_joint_type = true;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
};

// Z' = relu(BN(G Z W_y + Z W_z)), no biases.
template <typename T>
class GraphConvLayer {
 public:
  GraphConvLayer(std::size_t in_features, std::size_t out_features, T bn_momentum, T bn_epsilon,
                 std::mt19937_64& rng);

  // z: [N, T, J, Din], adjacency: [N, T, J, J].
  Tensor<T> forward(const Tensor<T>& z, const Tensor<T>& adjacency);

  Linear<T>& transform() { return transform_; }
  Linear<T>& residual() { return residual_; }
  BatchNorm<T>& norm() { return norm_; }

  void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const;

 private:
  Linear<T> transform_;
  Linear<T> residual_;
  BatchNorm<T> norm_;
};

template <typename T>
struct JointLevelOutput {
  Tensor<T> features;   // [N, T, J, gcn_dims.back()]
  Tensor<T> adjacency;  // [N, T, J, J], rows sum to 1
};

template <typename T>
class JointLevelModule {
 public:
  JointLevelModule(const JointGraphConfig& config, std::mt19937_64& rng);

  // Joint-type embeddings for the given slot -> type map: [J, C1].
  Tensor<T> joint_semantics(std::span<const int> joint_types) const;

  // concat(z, joint semantics) over the channel axis: [N, T, J, 2 C1].
  Tensor<T> concat_semantics(const Tensor<T>& z, const Tensor<T>& semantics) const;

  // G = row softmax of theta(Z) phi(Z)^T, one per (sample, frame): [N, T, J, J].
  Tensor<T> build_adjacency(const Tensor<T>& graph_input) const;

  JointLevelOutput<T> forward(const Tensor<T>& z, std::span<const int> joint_types);

  const JointGraphConfig& config() const { return config_; }
  EmbedMLP<T>& joint_embedder() { return joint_embed_; }
  Linear<T>& theta() { return theta_; }
  Linear<T>& phi() { return phi_; }
  std::vector<GraphConvLayer<T>>& layers() { return layers_; }
  void set_mode(Mode mode);

  void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const;

 private:
  JointGraphConfig config_;
  EmbedMLP<T> joint_embed_;
  Linear<T> theta_;
  Linear<T> phi_;
  std::vector<GraphConvLayer<T>> layers_;
};

}  // namespace sgn
