#include "sgn/model/layers.hpp"

#include <cmath>

#include "sgn/numerics/ops.hpp"

namespace sgn {

template <typename T>
Tensor<T> uniform_init(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> v(shape_numel(shape));
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return Tensor<T>(std::move(shape), std::move(v), true);
}

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features, bool with_bias, std::mt19937_64& rng)
    : weight_(uniform_init<T>({out_features, in_features}, in_features, rng)) {
  if (with_bias) bias_ = uniform_init<T>({out_features}, in_features, rng);
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x) const {
  return affine(x, weight_, bias_);
}

template <typename T>
void Linear<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const {
  out.push_back({prefix + ".weight", weight_, true});
  if (bias_.defined()) out.push_back({prefix + ".bias", bias_, true});
}

template <typename T>
EmbedMLP<T>::EmbedMLP(std::size_t in_features, std::size_t hidden, std::size_t out_features,
                      std::mt19937_64& rng)
    : first_(in_features, hidden, true, rng), second_(hidden, out_features, true, rng) {}

template <typename T>
Tensor<T> EmbedMLP<T>::forward(const Tensor<T>& x) const {
  return relu(second_.forward(relu(first_.forward(x))));
}

template <typename T>
void EmbedMLP<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const {
  first_.collect(out, prefix + ".fc1");
  second_.collect(out, prefix + ".fc2");
}

template Tensor<float> uniform_init(Shape, std::size_t, std::mt19937_64&);
template Tensor<double> uniform_init(Shape, std::size_t, std::mt19937_64&);
template class Linear<float>;
template class Linear<double>;
template class EmbedMLP<float>;
template class EmbedMLP<double>;

}  // namespace sgn
