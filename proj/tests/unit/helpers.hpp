#pragma once

#include <random>
#include <vector>

#include "sgn/numerics/tensor.hpp"

namespace sgn::test {

template <typename T>
Tensor<T> make(Shape shape, std::vector<T> values, bool grad = false) {
  return Tensor<T>(std::move(shape), std::move(values), grad);
}

template <typename T>
Tensor<T> random_tensor(Shape shape, std::uint64_t seed, double sd = 1.0, bool grad = false) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return Tensor<T>(std::move(shape), std::move(v), grad);
}

template <typename T>
std::vector<T> to_vec(const Tensor<T>& t) {
  return {t.values().begin(), t.values().end()};
}

}  // namespace sgn::test
