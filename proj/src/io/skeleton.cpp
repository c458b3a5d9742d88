#include "sgn/io/skeleton.hpp"

namespace sgn {

double motion_energy(const SkeletonSequence& seq) {
  double energy = 0.0;
  const std::size_t stride = seq.joints * 3;
  for (std::size_t t = 1; t < seq.frames; ++t) {
    for (std::size_t i = 0; i < stride; ++i) {
      const double d = static_cast<double>(seq.coords[t * stride + i]) - seq.coords[(t - 1) * stride + i];
      energy += d * d;
    }
  }
  return energy;
}

}  // namespace sgn
