#include "sgn/model/dynamics.hpp"

#include "sgn/error.hpp"
#include "sgn/numerics/ops.hpp"

namespace sgn {

void BodyPartition::validate(std::size_t joints) const {
  if (part_of_joint.size() != joints) {
    throw ConfigError("partition covers " + std::to_string(part_of_joint.size()) + " joints, model has " +
                      std::to_string(joints));
  }
  for (int p : part_of_joint) {
    if (p < 0 || static_cast<std::size_t>(p) >= reference_of_part.size()) {
      throw ConfigError("partition: joint assigned to unknown part " + std::to_string(p));
    }
  }
  for (std::size_t p = 0; p < reference_of_part.size(); ++p) {
    const int r = reference_of_part[p];
    if (r < 0 || static_cast<std::size_t>(r) >= joints || part_of_joint[r] != static_cast<int>(p)) {
      throw ConfigError("partition: reference joint of part " + std::to_string(p) + " lies outside the part");
    }
  }
}

BodyPartition BodyPartition::ntu_fine5() {
  // Parts: 0 left arm, 1 right arm, 2 left leg, 3 right leg, 4 torso.
  const int part_1based[25] = {
      4, 4, 4, 4,  // base of spine, middle of spine, neck, head
      0, 0, 0, 0,  // left shoulder, elbow, wrist, hand
      1, 1, 1, 1,  // right shoulder, elbow, wrist, hand
      2, 2, 2, 2,  // left hip, knee, ankle, foot
      3, 3, 3, 3,  // right hip, knee, ankle, foot
      4,           // spine at shoulders
      0, 0,        // left hand tip, thumb
      1, 1,        // right hand tip, thumb
  };
  BodyPartition p;
  p.part_of_joint.assign(std::begin(part_1based), std::end(part_1based));
  p.reference_of_part = {8 - 1, 12 - 1, 14 - 1, 18 - 1, 2 - 1};
  return p;
}

BodyPartition BodyPartition::single(std::size_t joints, int reference) {
  BodyPartition p;
  p.part_of_joint.assign(joints, 0);
  p.reference_of_part = {reference};
  return p;
}

MovementPreset parse_movement_preset(std::string_view name) {
  if (name == "fine5") return MovementPreset::fine5;
  if (name == "coarse1") return MovementPreset::coarse1;
  if (name == "none") return MovementPreset::none;
  throw ConfigError("unknown partition preset '" + std::string(name) + "' (expected fine5, coarse1 or none)");
}

std::string_view movement_preset_name(MovementPreset preset) {
  switch (preset) {
    case MovementPreset::fine5: return "fine5";
    case MovementPreset::coarse1: return "coarse1";
    case MovementPreset::none: return "none";
  }
  return "none";
}

std::optional<BodyPartition> partition_for(MovementPreset preset, std::size_t joints) {
  switch (preset) {
    case MovementPreset::fine5:
      if (joints != 25) throw ConfigError("partition preset fine5 needs the 25-joint layout");
      return BodyPartition::ntu_fine5();
    case MovementPreset::coarse1:
      return BodyPartition::single(joints, joints == 25 ? 1 : 0);
    case MovementPreset::none:
      return std::nullopt;
  }
  return std::nullopt;
}

template <typename T>
std::vector<T> compute_velocity(std::span<const T> coords, std::size_t frames, std::size_t joints) {
  const std::size_t stride = joints * 3;
  std::vector<T> v(coords.size(), T(0));
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t i = 0; i < stride; ++i) v[t * stride + i] = coords[t * stride + i] - coords[(t - 1) * stride + i];
  }
  return v;
}

template <typename T>
std::vector<T> compute_fine_grained(std::span<const T> x, std::size_t frames, std::size_t joints,
                                    const BodyPartition& partition) {
  std::vector<T> m(x.size());
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < joints; ++k) {
      const auto r = static_cast<std::size_t>(partition.reference_of_joint(k));
      for (std::size_t c = 0; c < 3; ++c) {
        m[(t * joints + k) * 3 + c] = x[(t * joints + k) * 3 + c] - x[(t * joints + r) * 3 + c];
      }
    }
  }
  return m;
}

template <typename T>
DynamicsRepresentation<T>::DynamicsRepresentation(const DynamicsConfig& config, std::mt19937_64& rng)
    : config_(config), position_(3, config.c1, config.c1, rng) {
  if (config.velocity) velocity_.emplace(3, config.c1, config.c1, rng);
  if (config.movement != MovementPreset::none) {
    movement_.emplace(3, config.c1, config.c1, rng);
    if (config.velocity) movement_velocity_.emplace(3, config.c1, config.c1, rng);
  }
}

template <typename T>
Tensor<T> DynamicsRepresentation<T>::forward(const Tensor<T>& coords, const BodyPartition* partition) const {
  if (coords.rank() != 4 || coords.dim(3) != 3) {
    throw DimensionError("dynamics: expected [N, T, J, 3] coordinates, got " + shape_str(coords.shape()));
  }
  const std::size_t n = coords.dim(0);
  const std::size_t frames = coords.dim(1);
  const std::size_t joints = coords.dim(2);
  const std::size_t per_sample = frames * joints * 3;

  std::vector<Tensor<T>> terms{position_.forward(coords)};
  if (!velocity_ && !movement_) return terms.front();

  std::vector<T> vel(coords.numel());
  std::vector<T> mov;
  std::vector<T> mov_vel;
  if (movement_) {
    if (partition == nullptr) throw ConfigError("dynamics: movement branches need a body partition");
    partition->validate(joints);
    mov.resize(coords.numel());
    if (movement_velocity_) mov_vel.resize(coords.numel());
  }
  for (std::size_t s = 0; s < n; ++s) {
    auto p = coords.values().subspan(s * per_sample, per_sample);
    auto v = compute_velocity<T>(p, frames, joints);
    std::copy(v.begin(), v.end(), vel.begin() + static_cast<std::ptrdiff_t>(s * per_sample));
    if (movement_) {
      auto m = compute_fine_grained<T>(p, frames, joints, *partition);
      std::copy(m.begin(), m.end(), mov.begin() + static_cast<std::ptrdiff_t>(s * per_sample));
      if (movement_velocity_) {
        auto mv = compute_fine_grained<T>(v, frames, joints, *partition);
        std::copy(mv.begin(), mv.end(), mov_vel.begin() + static_cast<std::ptrdiff_t>(s * per_sample));
      }
    }
  }
  if (velocity_) terms.push_back(velocity_->forward(Tensor<T>(coords.shape(), std::move(vel))));
  if (movement_) terms.push_back(movement_->forward(Tensor<T>(coords.shape(), std::move(mov))));
  if (movement_velocity_) {
    terms.push_back(movement_velocity_->forward(Tensor<T>(coords.shape(), std::move(mov_vel))));
  }
  return add_all<T>(terms);
}

template <typename T>
void DynamicsRepresentation<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const {
  position_.collect(out, prefix + ".position");
  if (velocity_) velocity_->collect(out, prefix + ".velocity");
  if (movement_) movement_->collect(out, prefix + ".movement");
  if (movement_velocity_) movement_velocity_->collect(out, prefix + ".movement_velocity");
}

template std::vector<float> compute_velocity(std::span<const float>, std::size_t, std::size_t);
template std::vector<double> compute_velocity(std::span<const double>, std::size_t, std::size_t);
template std::vector<float> compute_fine_grained(std::span<const float>, std::size_t, std::size_t,
                                                 const BodyPartition&);
template std::vector<double> compute_fine_grained(std::span<const double>, std::size_t, std::size_t,
                                                  const BodyPartition&);
template class DynamicsRepresentation<float>;
template class DynamicsRepresentation<double>;

}  // namespace sgn
