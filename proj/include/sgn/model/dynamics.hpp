#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgn/model/layers.hpp"
#include "sgn/numerics/tensor.hpp"

namespace sgn {

// Assignment of joints to body parts, each part with one reference joint whose
// position (and velocity) the part's joints are measured against.
struct BodyPartition {
  std::vector<int> part_of_joint;      // joint slot -> part id
  std::vector<int> reference_of_part;  // part id -> joint slot

  std::size_t num_joints() const { return part_of_joint.size(); }
  std::size_t num_parts() const { return reference_of_part.size(); }
  int reference_of_joint(std::size_t k) const { return reference_of_part[part_of_joint[k]]; }

  // Every joint in exactly one valid part; every reference inside its own part.
  void validate(std::size_t joints) const;

  // Kinect V2 25-joint layout: left arm, right arm, left leg, right leg, torso with
  // references left hand (8), right hand (12), left knee (14), right knee (18) and
  // middle of spine (2), all 1-based.
  static BodyPartition ntu_fine5();
  // Whole body as one part.
  static BodyPartition single(std::size_t joints, int reference);
};

enum class MovementPreset { fine5, coarse1, none };

MovementPreset parse_movement_preset(std::string_view name);
std::string_view movement_preset_name(MovementPreset preset);

// Partition for a preset; nullopt for `none`. fine5 needs the 25-joint layout.
std::optional<BodyPartition> partition_for(MovementPreset preset, std::size_t joints);

// v_t = p_t - p_{t-1}, with v_1 = 0. Layout T x J x 3.
template <typename T>
std::vector<T> compute_velocity(std::span<const T> coords, std::size_t frames, std::size_t joints);

// m_{t,k} = x_{t,k} - x_{t, ref(part(k))}. Applied to positions and to velocities alike.
template <typename T>
std::vector<T> compute_fine_grained(std::span<const T> x, std::size_t frames, std::size_t joints,
                                    const BodyPartition& partition);

struct DynamicsConfig {
  std::size_t c1 = 64;
  bool velocity = true;
  MovementPreset movement = MovementPreset::fine5;
};

// Embeds position, velocity and fine-grained movement of position and of
// velocity with four independent two-layer branches and sums them.
template <typename T>
class DynamicsRepresentation {
 public:
  DynamicsRepresentation(const DynamicsConfig& config, std::mt19937_64& rng);

  // coords: [N, T, J, 3] -> [N, T, J, C1]. `partition` is required when the
  // movement branches exist.
  Tensor<T> forward(const Tensor<T>& coords, const BodyPartition* partition) const;

  EmbedMLP<T>& position() { return position_; }
  EmbedMLP<T>* velocity() { return velocity_ ? &*velocity_ : nullptr; }
  EmbedMLP<T>* movement() { return movement_ ? &*movement_ : nullptr; }
  EmbedMLP<T>* movement_velocity() { return movement_velocity_ ? &*movement_velocity_ : nullptr; }

  void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const;

 private:
  DynamicsConfig config_;
  EmbedMLP<T> position_;
  std::optional<EmbedMLP<T>> velocity_;
  std::optional<EmbedMLP<T>> movement_;
  std::optional<EmbedMLP<T>> movement_velocity_;
};

}  // namespace sgn
