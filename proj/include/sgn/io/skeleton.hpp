#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sgn {

// One tracked body from one source clip.
struct SkeletonSequence {
  std::size_t frames = 0;
  std::size_t joints = 0;
  std::vector<float> coords;  // frames x joints x 3, camera coordinates in meters
  int label = -1;             // zero-based class id
  int subject_id = 0;
  int camera_id = 0;
  int setup_id = 0;
  int body_id = 0;            // order of first appearance within the source clip
  std::string dataset;
  std::string source;         // clip identifier, e.g. S001C002P003R002A060

  float& at(std::size_t t, std::size_t k, std::size_t c) { return coords[(t * joints + k) * 3 + c]; }
  float at(std::size_t t, std::size_t k, std::size_t c) const {
    return coords[(t * joints + k) * 3 + c];
  }

  bool operator==(const SkeletonSequence&) const = default;
};

// Sum over frames t >= 2 and joints of |p_t - p_{t-1}|^2.
double motion_energy(const SkeletonSequence& seq);

// Zero-filled or frozen tracks (a known Kinect artifact).
inline constexpr double kGhostEnergyThreshold = 1e-6;
inline bool is_ghost(const SkeletonSequence& seq) { return motion_energy(seq) < kGhostEnergyThreshold; }

}  // namespace sgn
