#include "sgn/preprocess/preprocess.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <set>

#include "sgn/error.hpp"

namespace sgn {

void SamplerConfig::validate() const {
  if (scales.empty()) throw ConfigError("sampler: at least one scale is required");
  std::set<int> seen;
  for (int s : scales) {
    if (s <= 0) throw ConfigError("sampler: clip counts must be positive");
    if (!seen.insert(s).second) throw ConfigError("sampler: clip counts must be distinct");
  }
}

void AugmentConfig::validate() const {
  if (rotation_deg < 0.0) throw ConfigError("augment: rotation range must be non-negative");
}

SkeletonSequence translate_to_first_frame(const SkeletonSequence& seq, std::size_t reference_joint) {
  if (seq.frames == 0) throw DataError("translate: empty sequence");
  if (reference_joint >= seq.joints) {
    throw ConfigError("translate: reference joint " + std::to_string(reference_joint) + " outside " +
                      std::to_string(seq.joints) + " joints");
  }
  SkeletonSequence out = seq;
  const float origin[3] = {seq.at(0, reference_joint, 0), seq.at(0, reference_joint, 1),
                           seq.at(0, reference_joint, 2)};
  for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] -= origin[i % 3];
  return out;
}

std::vector<SkeletonSequence> split_multi_person(const std::vector<SkeletonSequence>& bodies) {
  std::vector<SkeletonSequence> samples;
  for (const auto& b : bodies) {
    if (!is_ghost(b)) samples.push_back(b);
  }
  if (samples.empty()) {
    std::clog << "warning: no valid bodies in '" << (bodies.empty() ? std::string("?") : bodies.front().source)
              << "'\n";
  }
  return samples;
}

std::vector<std::size_t> clip_indices(std::size_t frames, std::size_t clips, SamplingMode mode,
                                      std::mt19937_64& rng) {
  if (frames == 0 || clips == 0) throw ConfigError("clip sampling needs T >= 1 and n >= 1");
  std::vector<std::size_t> out(clips);
  for (std::size_t i = 0; i < clips; ++i) {
    const std::size_t begin = i * frames / clips;
    const std::size_t end = (i + 1) * frames / clips;
    if (mode == SamplingMode::deterministic_first || end <= begin + 1) {
      out[i] = begin;
    } else {
      std::uniform_int_distribution<std::size_t> pick(begin, end - 1);
      out[i] = pick(rng);
    }
  }
  return out;
}

SkeletonSequence select_frames(const SkeletonSequence& seq, const std::vector<std::size_t>& frames) {
  SkeletonSequence out = seq;
  out.frames = frames.size();
  out.coords.resize(frames.size() * seq.joints * 3);
  const std::size_t stride = seq.joints * 3;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i] >= seq.frames) throw DataError("select_frames: frame index out of range");
    std::copy_n(seq.coords.begin() + static_cast<std::ptrdiff_t>(frames[i] * stride), stride,
                out.coords.begin() + static_cast<std::ptrdiff_t>(i * stride));
  }
  return out;
}

SkeletonSequence sample_clips(const SkeletonSequence& seq, std::size_t clips, SamplingMode mode,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return select_frames(seq, clip_indices(seq.frames, clips, mode, rng));
}

Rotation rotation_xyz(double ax, double ay, double az) {
  const double cx = std::cos(ax), sx = std::sin(ax);
  const double cy = std::cos(ay), sy = std::sin(ay);
  const double cz = std::cos(az), sz = std::sin(az);
  // Rz * Ry * Rx expanded.
  return {cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx,
          sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
          -sy,     cy * sx,                cy * cx};
}

SkeletonSequence rotate(const SkeletonSequence& seq, const Rotation& r) {
  SkeletonSequence out = seq;
  for (std::size_t i = 0; i + 2 < out.coords.size(); i += 3) {
    const double x = seq.coords[i], y = seq.coords[i + 1], z = seq.coords[i + 2];
    out.coords[i] = static_cast<float>(r[0] * x + r[1] * y + r[2] * z);
    out.coords[i + 1] = static_cast<float>(r[3] * x + r[4] * y + r[5] * z);
    out.coords[i + 2] = static_cast<float>(r[6] * x + r[7] * y + r[8] * z);
  }
  return out;
}

SkeletonSequence rotate_augment(const SkeletonSequence& seq, const AugmentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (!cfg.enabled) return seq;
  std::mt19937_64 rng(seed);
  const double range = cfg.rotation_deg * std::numbers::pi / 180.0;
  std::uniform_real_distribution<double> angle(-range, range);
  const double ax = angle(rng);
  const double ay = angle(rng);
  const double az = angle(rng);
  return rotate(seq, rotation_xyz(ax, ay, az));
}

}  // namespace sgn
