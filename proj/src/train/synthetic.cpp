#include "sgn/train/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "sgn/error.hpp"
#include "sgn/util.hpp"

namespace sgn {

namespace {

using Point = std::array<double, 3>;

// Standing pose, x to the subject's right, y up, meters.
std::array<Point, 25> rest_pose() {
  return {{
      {0.0, 0.0, 0.0},       {0.0, 0.25, 0.0},      {0.0, 0.5, 0.0},       {0.0, 0.62, 0.0},
      {-0.18, 0.45, 0.0},    {-0.2, 0.2, 0.0},      {-0.21, -0.02, 0.0},   {-0.21, -0.09, 0.0},
      {0.18, 0.45, 0.0},     {0.2, 0.2, 0.0},       {0.21, -0.02, 0.0},    {0.21, -0.09, 0.0},
      {-0.1, -0.02, 0.0},    {-0.1, -0.42, 0.0},    {-0.1, -0.8, 0.0},     {-0.1, -0.85, 0.1},
      {0.1, -0.02, 0.0},     {0.1, -0.42, 0.0},     {0.1, -0.8, 0.0},      {0.1, -0.85, 0.1},
      {0.0, 0.45, 0.0},      {-0.21, -0.14, 0.0},   {-0.18, -0.08, 0.02},  {0.21, -0.14, 0.0},
      {0.18, -0.08, 0.02},
  }};
}

const std::vector<std::size_t> kLeftArm{4, 5, 6, 7, 21, 22};
const std::vector<std::size_t> kLeftArmDistal{5, 6, 7, 21, 22};
const std::vector<std::size_t> kRightLeg{16, 17, 18, 19};
const std::vector<std::size_t> kRightLegDistal{17, 18, 19};

// Rotates p about `pivot` by `angle` around axis 0 (x) or 2 (z).
Point rotate_about(const Point& p, const Point& pivot, double angle, int axis) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Point d{p[0] - pivot[0], p[1] - pivot[1], p[2] - pivot[2]};
  Point r = d;
  if (axis == 2) {
    r[0] = c * d[0] - s * d[1];
    r[1] = s * d[0] + c * d[1];
  } else {
    r[1] = c * d[1] - s * d[2];
    r[2] = s * d[1] + c * d[2];
  }
  return {r[0] + pivot[0], r[1] + pivot[1], r[2] + pivot[2]};
}

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

SkeletonSequence generate(int label, std::mt19937_64& rng, const SyntheticConfig& cfg) {
  std::uniform_int_distribution<std::size_t> frames_dist(cfg.min_frames, cfg.max_frames);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, cfg.noise);

  const std::size_t frames = frames_dist(rng);
  const double body_scale = 0.9 + 0.2 * unit(rng);
  const Point offset{0.3 * (unit(rng) - 0.5), 0.1 * (unit(rng) - 0.5), 2.5 + 0.6 * unit(rng)};
  // Hold fractions before and after the motion come from the same law, so the
  // pose multiset of a sequence and of its reversal are identically distributed.
  const double hold_before = 0.1 + 0.2 * unit(rng);
  const double hold_after = 0.1 + 0.2 * unit(rng);
  const bool arm = label == kLeftHandRaise || label == kLeftHandLower;
  const double amplitude = arm ? (0.65 + 0.25 * unit(rng)) * std::numbers::pi : (0.45 + 0.25 * unit(rng));

  const auto pose = rest_pose();
  SkeletonSequence seq;
  seq.frames = frames;
  seq.joints = 25;
  seq.label = label;
  seq.coords.resize(frames * 25 * 3);
  for (std::size_t t = 0; t < frames; ++t) {
    const double time = frames > 1 ? static_cast<double>(t) / static_cast<double>(frames - 1) : 0.0;
    const double progress = smoothstep((time - hold_before) / std::max(1e-6, 1.0 - hold_before - hold_after));
    const double angle = amplitude * progress;
    std::array<Point, 25> p = pose;
    if (arm) {
      // Arm swings out to the side and up about the left shoulder.
      for (std::size_t k : kLeftArmDistal) p[k] = rotate_about(pose[k], pose[4], -angle, 2);
    } else {
      // Leg swings forward about the right hip.
      for (std::size_t k : kRightLegDistal) p[k] = rotate_about(pose[k], pose[16], -angle, 0);
    }
    const std::size_t out_t = (label == kLeftHandLower || label == kRightFootReturn) ? frames - 1 - t : t;
    for (std::size_t k = 0; k < 25; ++k) {
      for (int c = 0; c < 3; ++c) {
        seq.coords[(out_t * 25 + k) * 3 + c] =
            static_cast<float>(body_scale * p[k][c] + offset[c] + jitter(rng));
      }
    }
  }
  return seq;
}

}  // namespace

std::vector<SkeletonSequence> make_synthetic(const SyntheticConfig& config) {
  if (config.min_frames == 0 || config.max_frames < config.min_frames) {
    throw ConfigError("synthetic frame range must satisfy 0 < min_frames <= max_frames");
  }
  std::vector<SkeletonSequence> out;
  for (int split = 0; split < 2; ++split) {
    const std::size_t per_class = split == 0 ? config.train_per_class : config.test_per_class;
    for (std::size_t i = 0; i < per_class; ++i) {
      for (int label = 0; label < 4; ++label) {
        std::mt19937_64 rng(derive_seed(config.seed, {static_cast<std::uint64_t>(split), i,
                                                      static_cast<std::uint64_t>(label)}));
        SkeletonSequence seq = generate(label, rng, config);
        seq.subject_id = split == 0 ? 1 : 2;
        seq.camera_id = 1;
        seq.setup_id = 1;
        seq.dataset = "synthetic";
        seq.source = std::string(split == 0 ? "train" : "test") + "_" + std::to_string(i) + "_a" +
                     std::to_string(label);
        out.push_back(std::move(seq));
      }
    }
  }
  return out;
}

std::vector<std::size_t> synthetic_moving_joints(int label) {
  switch (label) {
    case kLeftHandRaise:
    case kLeftHandLower: return kLeftArm;
    case kRightFootSwing:
    case kRightFootReturn: return kRightLeg;
    default: throw DataError("synthetic label " + std::to_string(label) + " outside [0, 4)");
  }
}

}  // namespace sgn
