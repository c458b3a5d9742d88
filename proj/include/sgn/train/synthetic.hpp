#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sgn/io/skeleton.hpp"

namespace sgn {

// Four motion classes on the 25-joint layout. Classes 1 and 3 are the time
// reversals of 0 and 2, so the pairs share their set of poses and differ only
// in frame order.
enum SyntheticClass : int {
  kLeftHandRaise = 0,
  kLeftHandLower = 1,
  kRightFootSwing = 2,
  kRightFootReturn = 3,
};

struct SyntheticConfig {
  std::size_t train_per_class = 20;
  std::size_t test_per_class = 10;
  std::size_t min_frames = 40;
  std::size_t max_frames = 60;
  double noise = 0.004;  // per-coordinate jitter, meters
  std::uint64_t seed = 7;
};

// Train records carry subject 1, test records subject 2, so a cross-subject
// split with train ids {1} and test ids {2} separates them.
std::vector<SkeletonSequence> make_synthetic(const SyntheticConfig& config);

// Joint slots (zero-based) of the body part that moves in the given class.
std::vector<std::size_t> synthetic_moving_joints(int label);

}  // namespace sgn
