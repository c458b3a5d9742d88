#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "sgn/io/skeleton.hpp"

namespace sgn {

enum class SamplingMode { random, deterministic_first };

struct SamplerConfig {
  std::vector<int> scales{15, 20, 25};
  SamplingMode mode = SamplingMode::random;
  std::uint64_t seed = 0;

  void validate() const;  // positive, distinct
};

struct AugmentConfig {
  double rotation_deg = 17.0;  // 30 for the NTU60 cross-view protocol
  bool enabled = true;

  void validate() const;
};

// Zero-based index of "middle of spine" in the 25-joint Kinect V2 layout.
inline constexpr std::size_t kSpineMidJoint = 1;

// Subtracts the first frame's reference-joint position from every joint of every frame.
SkeletonSequence translate_to_first_frame(const SkeletonSequence& seq,
                                          std::size_t reference_joint = kSpineMidJoint);

// Drops ghost bodies and returns the remaining bodies as independent samples.
// All bodies from one clip keep the clip's label and source, so scores can be
// averaged per source at evaluation time. Logs a warning when nothing is left.
std::vector<SkeletonSequence> split_multi_person(const std::vector<SkeletonSequence>& bodies);

// Zero-based frame indices, one per clip. The range [0, T) is cut into n clips
// at floor(i*T/n); random mode draws uniformly inside each clip, deterministic
// mode takes the first frame. When T < n some clips are empty and repeat the
// frame at their boundary.
std::vector<std::size_t> clip_indices(std::size_t frames, std::size_t clips, SamplingMode mode,
                                      std::mt19937_64& rng);

SkeletonSequence select_frames(const SkeletonSequence& seq, const std::vector<std::size_t>& frames);

SkeletonSequence sample_clips(const SkeletonSequence& seq, std::size_t clips, SamplingMode mode,
                              std::uint64_t seed);

using Rotation = std::array<double, 9>;  // row-major 3x3

// R = Rz(az) * Ry(ay) * Rx(ax), right-handed, counterclockwise, radians.
Rotation rotation_xyz(double ax, double ay, double az);

SkeletonSequence rotate(const SkeletonSequence& seq, const Rotation& r);

// Draws one angle per axis uniformly in [-rotation_deg, rotation_deg] and rotates
// every joint of every frame by the same matrix. Identity when disabled.
SkeletonSequence rotate_augment(const SkeletonSequence& seq, const AugmentConfig& cfg, std::uint64_t seed);

}  // namespace sgn
