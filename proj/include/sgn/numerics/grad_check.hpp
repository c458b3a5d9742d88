#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sgn/numerics/tensor.hpp"

namespace sgn {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // 0 checks every coordinate; otherwise a seeded sample of this many per tensor.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
  // Skip coordinates whose one-sided differences (f(x+h)-f(x))/h and
  // (f(x)-f(x-h))/h disagree by more than kink_ratio of their magnitude: the
  // step straddles a relu or max-pool switch, where no derivative exists. Uses
  // forward values only, so it cannot hide a faulty backward.
  bool skip_kinks = false;
  double kink_ratio = 0.1;
};

struct GradCheckEntry {
  std::string name;
  std::size_t coords_checked = 0;
  std::size_t kinks_skipped = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  std::size_t kinks_skipped = 0;
  bool passed = true;

  // Worst entry first.
  std::vector<GradCheckEntry> failures(double tolerance) const;
};

// Compares reverse-mode gradients of the scalar `loss` against central
// differences (f(x+h) - f(x-h)) / 2h, coordinate by coordinate. Relative error
// is |a - n| / max(|a|, |n|, 1e-8). Tensors with requires_grad() == false are
// left out of the report.
GradCheckReport grad_check(const std::function<Tensor<double>()>& loss,
                           std::span<const NamedTensor<double>> params,
                           const GradCheckOptions& options = {});

}  // namespace sgn
