#include "sgn/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sgn {

GradCheckReport grad_check(const std::function<Tensor<double>()>& loss,
                           std::span<const NamedTensor<double>> params,
                           const GradCheckOptions& options) {
  for (auto p : params) {
    if (p.tensor.requires_grad()) p.tensor.zero_grad();
  }
  const Tensor<double> base = loss();
  const double center = base.item();
  base.backward();

  std::vector<std::vector<double>> analytic;
  for (const auto& p : params) {
    if (p.tensor.has_grad()) {
      analytic.emplace_back(p.tensor.grad().begin(), p.tensor.grad().end());
    } else {
      analytic.emplace_back(p.tensor.numel(), 0.0);
    }
  }

  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<double> tensor = params[i].tensor;
    if (!tensor.requires_grad()) continue;
    std::vector<std::size_t> coords(tensor.numel());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_tensor > 0 && coords.size() > options.max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    GradCheckEntry entry;
    entry.name = params[i].name;
    auto values = tensor.mutable_values();
    for (std::size_t c : coords) {
      const double saved = values[c];
      values[c] = saved + options.step;
      const double up = loss().item();
      values[c] = saved - options.step;
      const double down = loss().item();
      values[c] = saved;
      if (options.skip_kinks) {
        const double forward = (up - center) / options.step;
        const double backward = (center - down) / options.step;
        if (std::abs(forward - backward) > options.kink_ratio * std::max({std::abs(forward), std::abs(backward), 1e-6})) {
          ++entry.kinks_skipped;
          continue;
        }
      }
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[i][c];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      if (rel > entry.max_rel_error || entry.coords_checked == 0) {
        entry.max_rel_error = std::max(entry.max_rel_error, rel);
        entry.worst_index = c;
        entry.analytic_at_worst = a;
        entry.numeric_at_worst = numeric;
      }
      ++entry.coords_checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.coords_checked += entry.coords_checked;
    report.kinks_skipped += entry.kinks_skipped;
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

std::vector<GradCheckEntry> GradCheckReport::failures(double tolerance) const {
  std::vector<GradCheckEntry> out;
  for (const auto& e : entries) {
    if (e.max_rel_error >= tolerance) out.push_back(e);
  }
  std::sort(out.begin(), out.end(),
            [](const GradCheckEntry& a, const GradCheckEntry& b) { return a.max_rel_error > b.max_rel_error; });
  return out;
}

}  // namespace sgn
