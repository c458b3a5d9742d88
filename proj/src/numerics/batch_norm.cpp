#include "sgn/numerics/batch_norm.hpp"

#include <cmath>

#include "sgn/error.hpp"

namespace sgn {

template <typename T>
BatchNorm<T>::BatchNorm(std::size_t channels, T momentum, T epsilon)
    : gamma_(Tensor<T>::full({channels}, T(1), true)),
      beta_(Tensor<T>::zeros({channels}, true)),
      running_mean_(Tensor<T>::zeros({channels})),
      running_var_(Tensor<T>::full({channels}, T(1))),
      momentum_(momentum),
      epsilon_(epsilon) {}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x) {
  using Node = typename Tensor<T>::Node;
  const std::size_t c = channels();
  if (x.shape().back() != c) {
    throw DimensionError("batch_norm: input " + shape_str(x.shape()) + " for " + std::to_string(c) +
                         " channels");
  }
  const std::size_t rows = x.numel() / c;
  const auto& xv = x.values();
  const auto& g = gamma_.values();
  const auto& b = beta_.values();

  std::vector<T> mean(c, T(0));
  std::vector<T> var(c, T(0));
  if (mode_ == Mode::train) {
    if (x.dim(0) < 2) throw ConfigError("batch_norm: train mode needs a batch of at least 2");
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < c; ++j) mean[j] += xv[r * c + j];
    }
    for (auto& m : mean) m /= static_cast<T>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < c; ++j) {
        const T d = xv[r * c + j] - mean[j];
        var[j] += d * d;
      }
    }
    for (auto& v : var) v /= static_cast<T>(rows);
    auto rm = running_mean_.mutable_values();
    auto rv = running_var_.mutable_values();
    const T unbias = rows > 1 ? static_cast<T>(rows) / static_cast<T>(rows - 1) : T(1);
    for (std::size_t j = 0; j < c; ++j) {
      rm[j] = (T(1) - momentum_) * rm[j] + momentum_ * mean[j];
      rv[j] = (T(1) - momentum_) * rv[j] + momentum_ * var[j] * unbias;
    }
  } else {
    std::copy(running_mean_.values().begin(), running_mean_.values().end(), mean.begin());
    std::copy(running_var_.values().begin(), running_var_.values().end(), var.begin());
  }

  std::vector<T> inv_std(c);
  for (std::size_t j = 0; j < c; ++j) inv_std[j] = T(1) / std::sqrt(var[j] + epsilon_);
  std::vector<T> xhat(x.numel());
  std::vector<T> y(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t i = r * c + j;
      xhat[i] = (xv[i] - mean[j]) * inv_std[j];
      y[i] = g[j] * xhat[i] + b[j];
    }
  }

  const bool batch_stats = mode_ == Mode::train;
  return Tensor<T>::make_result(
      x.shape(), std::move(y), {x, gamma_, beta_},
      [xn = x.node_ptr(), gn = gamma_.node_ptr(), bn = beta_.node_ptr(), xhat = std::move(xhat),
       inv_std = std::move(inv_std), rows, c, batch_stats](const Node& out) {
        const auto& dy = out.grad;
        std::vector<T> sum_dy(c, T(0));
        std::vector<T> sum_dy_xhat(c, T(0));
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < c; ++j) {
            sum_dy[j] += dy[r * c + j];
            sum_dy_xhat[j] += dy[r * c + j] * xhat[r * c + j];
          }
        }
        if (gn->requires_grad) {
          auto& dg = gn->ensure_grad();
          for (std::size_t j = 0; j < c; ++j) dg[j] += sum_dy_xhat[j];
        }
        if (bn->requires_grad) {
          auto& db = bn->ensure_grad();
          for (std::size_t j = 0; j < c; ++j) db[j] += sum_dy[j];
        }
        if (!xn->requires_grad) return;
        auto& dx = xn->ensure_grad();
        const auto& gamma = gn->values;
        const T count = static_cast<T>(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < c; ++j) {
            const std::size_t i = r * c + j;
            if (batch_stats) {
              dx[i] += gamma[j] * inv_std[j] *
                       (dy[i] - sum_dy[j] / count - xhat[i] * sum_dy_xhat[j] / count);
            } else {
              dx[i] += gamma[j] * inv_std[j] * dy[i];
            }
          }
        }
      });
}

template <typename T>
void BatchNorm<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) const {
  out.push_back({prefix + ".gamma", gamma_, true});
  out.push_back({prefix + ".beta", beta_, true});
  out.push_back({prefix + ".running_mean", running_mean_, false});
  out.push_back({prefix + ".running_var", running_var_, false});
}

template class BatchNorm<float>;
template class BatchNorm<double>;

}  // namespace sgn
