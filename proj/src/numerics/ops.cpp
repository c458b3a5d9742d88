#include "sgn/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gemm.hpp"
#include "sgn/error.hpp"

namespace sgn {

namespace {

template <typename T>
using NodeT = typename Tensor<T>::Node;
template <typename T>
using NodePtr = std::shared_ptr<NodeT<T>>;

template <typename T>
NodePtr<T> grad_target(const Tensor<T>& t) {
  return (t.defined() && t.requires_grad()) ? t.node_ptr() : nullptr;
}

// For every element of `target`, the flat index of the element of `source` that
// broadcasts onto it.
std::vector<std::size_t> broadcast_index(const Shape& target, const Shape& source) {
  if (source.size() > target.size()) {
    throw DimensionError("cannot broadcast " + shape_str(source) + " to " + shape_str(target));
  }
  const std::size_t rank = target.size();
  const std::size_t lead = rank - source.size();
  std::vector<std::size_t> stride(rank, 0);
  std::size_t s = 1;
  for (std::size_t i = source.size(); i-- > 0;) {
    const std::size_t axis = lead + i;
    if (source[i] == target[axis]) {
      stride[axis] = s;
    } else if (source[i] != 1) {
      throw DimensionError("cannot broadcast " + shape_str(source) + " to " + shape_str(target));
    }
    s *= source[i];
  }
  std::vector<std::size_t> out(shape_numel(target));
  std::vector<std::size_t> counter(rank, 0);
  std::size_t offset = 0;
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = offset;
    for (std::size_t axis = rank; axis-- > 0;) {
      offset += stride[axis];
      if (++counter[axis] < target[axis]) break;
      offset -= stride[axis] * counter[axis];
      counter[axis] = 0;
    }
  }
  return out;
}

template <typename T>
std::size_t leading_count(const Shape& shape, std::size_t trailing) {
  std::size_t n = 1;
  for (std::size_t i = 0; i + trailing < shape.size(); ++i) n *= shape[i];
  return n;
}

}  // namespace

template <typename T>
Tensor<T> affine(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (weight.rank() != 2 || x.shape().back() != weight.dim(1)) {
    throw DimensionError("affine: input " + shape_str(x.shape()) + " incompatible with weight " +
                         shape_str(weight.shape()));
  }
  const std::size_t din = weight.dim(1);
  const std::size_t dout = weight.dim(0);
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != dout)) {
    throw DimensionError("affine: bias " + shape_str(bias.shape()) + " incompatible with weight " +
                         shape_str(weight.shape()));
  }
  const std::size_t rows = x.numel() / din;
  Shape out_shape = x.shape();
  out_shape.back() = dout;
  std::vector<T> y(rows * dout, T(0));
  if (bias.defined()) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(bias.values().begin(), bias.values().end(), y.begin() + r * dout);
    }
  }
  detail::gemm_nt(x.values().data(), weight.values().data(), y.data(), rows, din, dout);

  return Tensor<T>::make_result(
      std::move(out_shape), std::move(y), {x, weight, bias},
      [xn = x.node_ptr(), wn = weight.node_ptr(), bn = bias.defined() ? bias.node_ptr() : nullptr,
       rows, din, dout](const NodeT<T>& out) {
        const T* dy = out.grad.data();
        if (xn->requires_grad) {
          detail::gemm_nn(dy, wn->values.data(), xn->ensure_grad().data(), rows, dout, din);
        }
        if (wn->requires_grad) {
          detail::gemm_tn(dy, xn->values.data(), wn->ensure_grad().data(), dout, rows, din);
        }
        if (bn && bn->requires_grad) {
          auto& db = bn->ensure_grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t o = 0; o < dout; ++o) db[o] += dy[r * dout + o];
          }
        }
      });
}

template <typename T>
Tensor<T> batched_matmul(const Tensor<T>& a, const Tensor<T>& b, bool transpose_b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  auto fail = [&] {
    throw DimensionError("batched_matmul: " + shape_str(sa) + " incompatible with " + shape_str(sb) +
                         (transpose_b ? " (transposed)" : ""));
  };
  if (sa.size() < 2 || sa.size() != sb.size()) fail();
  for (std::size_t i = 0; i + 2 < sa.size(); ++i) {
    if (sa[i] != sb[i]) fail();
  }
  const std::size_t m = sa[sa.size() - 2];
  const std::size_t k = sa.back();
  const std::size_t kb = transpose_b ? sb.back() : sb[sb.size() - 2];
  const std::size_t n = transpose_b ? sb[sb.size() - 2] : sb.back();
  if (k != kb) fail();
  const std::size_t batch = leading_count<T>(sa, 2);

  Shape out_shape = sa;
  out_shape.back() = n;
  std::vector<T> c(batch * m * n, T(0));
  for (std::size_t i = 0; i < batch; ++i) {
    const T* pa = a.values().data() + i * m * k;
    const T* pb = b.values().data() + i * k * n;
    T* pc = c.data() + i * m * n;
    if (transpose_b) {
      detail::gemm_nt(pa, pb, pc, m, k, n);
    } else {
      detail::gemm_nn(pa, pb, pc, m, k, n);
    }
  }

  return Tensor<T>::make_result(
      std::move(out_shape), std::move(c), {a, b},
      [an = a.node_ptr(), bn = b.node_ptr(), batch, m, k, n, transpose_b](const NodeT<T>& out) {
        for (std::size_t i = 0; i < batch; ++i) {
          const T* dc = out.grad.data() + i * m * n;
          const T* pa = an->values.data() + i * m * k;
          const T* pb = bn->values.data() + i * k * n;
          if (an->requires_grad) {
            T* da = an->ensure_grad().data() + i * m * k;
            if (transpose_b) {
              detail::gemm_nn(dc, pb, da, m, n, k);
            } else {
              detail::gemm_nt(dc, pb, da, m, n, k);
            }
          }
          if (bn->requires_grad) {
            T* db = bn->ensure_grad().data() + i * k * n;
            if (transpose_b) {
              detail::gemm_tn(dc, pa, db, n, m, k);
            } else {
              detail::gemm_tn(pa, dc, db, k, m, n);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  std::vector<T> y(a.values().begin(), a.values().end());
  if (a.shape() == b.shape()) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += b.values()[i];
    return Tensor<T>::make_result(a.shape(), std::move(y), {a, b},
                                  [an = grad_target(a), bn = grad_target(b)](const NodeT<T>& out) {
                                    for (auto* p : {an.get(), bn.get()}) {
                                      if (!p) continue;
                                      auto& g = p->ensure_grad();
                                      for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i];
                                    }
                                  });
  }
  auto index = broadcast_index(a.shape(), b.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b.values()[index[i]];
  return Tensor<T>::make_result(
      a.shape(), std::move(y), {a, b},
      [an = grad_target(a), bn = grad_target(b), index = std::move(index)](const NodeT<T>& out) {
        if (an) {
          auto& g = an->ensure_grad();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i];
        }
        if (bn) {
          auto& g = bn->ensure_grad();
          for (std::size_t i = 0; i < index.size(); ++i) g[index[i]] += out.grad[i];
        }
      });
}

template <typename T>
Tensor<T> add_all(std::span<const Tensor<T>> terms) {
  if (terms.empty()) throw DimensionError("add_all: no terms");
  const Shape& shape = terms[0].shape();
  std::vector<T> y(terms[0].values().begin(), terms[0].values().end());
  std::vector<Tensor<T>> inputs{terms[0]};
  for (std::size_t t = 1; t < terms.size(); ++t) {
    if (terms[t].shape() != shape) {
      throw DimensionError("add_all: " + shape_str(terms[t].shape()) + " vs " + shape_str(shape));
    }
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += terms[t].values()[i];
    inputs.push_back(terms[t]);
  }
  std::vector<NodePtr<T>> targets;
  for (const auto& t : terms) targets.push_back(grad_target(t));
  return Tensor<T>::make_result(shape, std::move(y), std::move(inputs),
                                [targets = std::move(targets)](const NodeT<T>& out) {
                                  for (const auto& p : targets) {
                                    if (!p) continue;
                                    auto& g = p->ensure_grad();
                                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i];
                                  }
                                });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  std::vector<T> y(x.values().begin(), x.values().end());
  for (auto& v : y) v *= factor;
  return Tensor<T>::make_result(x.shape(), std::move(y), {x},
                                [xn = x.node_ptr(), factor](const NodeT<T>& out) {
                                  auto& g = xn->ensure_grad();
                                  for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * out.grad[i];
                                });
}

template <typename T>
Tensor<T> broadcast_to(const Tensor<T>& x, const Shape& shape) {
  auto index = broadcast_index(shape, x.shape());
  std::vector<T> y(index.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x.values()[index[i]];
  return Tensor<T>::make_result(shape, std::move(y), {x},
                                [xn = x.node_ptr(), index = std::move(index)](const NodeT<T>& out) {
                                  auto& g = xn->ensure_grad();
                                  for (std::size_t i = 0; i < index.size(); ++i) g[index[i]] += out.grad[i];
                                });
}

template <typename T>
Tensor<T> concat_last(const Tensor<T>& a, const Tensor<T>& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  bool ok = sa.size() == sb.size();
  for (std::size_t i = 0; ok && i + 1 < sa.size(); ++i) ok = sa[i] == sb[i];
  if (!ok) throw DimensionError("concat_last: " + shape_str(sa) + " vs " + shape_str(sb));
  const std::size_t ca = sa.back();
  const std::size_t cb = sb.back();
  const std::size_t rows = a.numel() / ca;
  Shape out_shape = sa;
  out_shape.back() = ca + cb;
  std::vector<T> y(rows * (ca + cb));
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(a.values().data() + r * ca, ca, y.data() + r * (ca + cb));
    std::copy_n(b.values().data() + r * cb, cb, y.data() + r * (ca + cb) + ca);
  }
  return Tensor<T>::make_result(
      std::move(out_shape), std::move(y), {a, b},
      [an = grad_target(a), bn = grad_target(b), rows, ca, cb](const NodeT<T>& out) {
        const std::size_t c = ca + cb;
        if (an) {
          auto& g = an->ensure_grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < ca; ++j) g[r * ca + j] += out.grad[r * c + j];
          }
        }
        if (bn) {
          auto& g = bn->ensure_grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < cb; ++j) g[r * cb + j] += out.grad[r * c + ca + j];
          }
        }
      });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: " + shape_str(x.shape()) + " to " + shape_str(shape));
  }
  std::vector<T> y(x.values().begin(), x.values().end());
  return Tensor<T>::make_result(std::move(shape), std::move(y), {x},
                                [xn = x.node_ptr()](const NodeT<T>& out) {
                                  auto& g = xn->ensure_grad();
                                  for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i];
                                });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  std::vector<T> y(x.values().begin(), x.values().end());
  for (auto& v : y) v = v > T(0) ? v : T(0);
  return Tensor<T>::make_result(x.shape(), std::move(y), {x},
                                [xn = x.node_ptr()](const NodeT<T>& out) {
                                  auto& g = xn->ensure_grad();
                                  for (std::size_t i = 0; i < g.size(); ++i) {
                                    if (xn->values[i] > T(0)) g[i] += out.grad[i];
                                  }
                                });
}

template <typename T>
Tensor<T> softmax_last(const Tensor<T>& x) {
  const std::size_t c = x.shape().back();
  const std::size_t rows = x.numel() / c;
  std::vector<T> y(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.values().data() + r * c;
    T* o = y.data() + r * c;
    T mx = *std::max_element(in, in + c);
    T total = 0;
    for (std::size_t j = 0; j < c; ++j) {
      o[j] = std::exp(in[j] - mx);
      total += o[j];
    }
    for (std::size_t j = 0; j < c; ++j) o[j] /= total;
  }
  return Tensor<T>::make_result(x.shape(), std::move(y), {x},
                                [xn = x.node_ptr(), rows, c](const NodeT<T>& out) {
                                  auto& g = xn->ensure_grad();
                                  for (std::size_t r = 0; r < rows; ++r) {
                                    const T* yr = out.values.data() + r * c;
                                    const T* dy = out.grad.data() + r * c;
                                    T dot = 0;
                                    for (std::size_t j = 0; j < c; ++j) dot += dy[j] * yr[j];
                                    for (std::size_t j = 0; j < c; ++j) g[r * c + j] += yr[j] * (dy[j] - dot);
                                  }
                                });
}

template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& x) {
  if (x.rank() != 2) throw DimensionError("softmax_rows expects a matrix, got " + shape_str(x.shape()));
  return softmax_last(x);
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T total = 0;
  for (T v : x.values()) total += v;
  return Tensor<T>::make_result(Shape{1}, std::vector<T>{total}, {x},
                                [xn = x.node_ptr()](const NodeT<T>& out) {
                                  auto& g = xn->ensure_grad();
                                  for (auto& v : g) v += out.grad[0];
                                });
}

template <typename T>
Tensor<T> temporal_conv(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (x.rank() != 3 || weight.rank() != 3 || weight.dim(1) != x.dim(2)) {
    throw DimensionError("temporal_conv: input " + shape_str(x.shape()) + " incompatible with weight " +
                         shape_str(weight.shape()));
  }
  const std::size_t n = x.dim(0);
  const std::size_t frames = x.dim(1);
  const std::size_t cin = x.dim(2);
  const std::size_t cout = weight.dim(0);
  const std::size_t taps = weight.dim(2);
  if (taps % 2 == 0) {
    throw ConfigError("temporal_conv: kernel size must be odd, got " + std::to_string(taps));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != cout)) {
    throw DimensionError("temporal_conv: bias " + shape_str(bias.shape()) + " for " +
                         std::to_string(cout) + " output channels");
  }
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(taps / 2);

  // One contiguous [Cout, Cin] matrix per tap.
  std::vector<T> packed(taps * cout * cin);
  const auto& w = weight.values();
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t i = 0; i < cin; ++i) {
      for (std::size_t k = 0; k < taps; ++k) packed[(k * cout + o) * cin + i] = w[(o * cin + i) * taps + k];
    }
  }

  // Visits every (sample, tap) pair with the valid output frame range [t0, t1).
  auto for_each_block = [n, frames, taps, pad](auto&& fn) {
    const auto len = static_cast<std::ptrdiff_t>(frames);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t k = 0; k < taps; ++k) {
        const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(k) - pad;
        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -off);
        const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(len, len - off);
        if (t1 > t0) fn(s, k, static_cast<std::size_t>(t0), static_cast<std::size_t>(t0 + off),
                        static_cast<std::size_t>(t1 - t0));
      }
    }
  };

  std::vector<T> y(n * frames * cout, T(0));
  if (bias.defined()) {
    for (std::size_t r = 0; r < n * frames; ++r) {
      std::copy(bias.values().begin(), bias.values().end(), y.begin() + r * cout);
    }
  }
  const T* xv = x.values().data();
  for_each_block([&](std::size_t s, std::size_t k, std::size_t out_t, std::size_t in_t, std::size_t len) {
    detail::gemm_nt(xv + (s * frames + in_t) * cin, packed.data() + k * cout * cin,
                    y.data() + (s * frames + out_t) * cout, len, cin, cout);
  });

  return Tensor<T>::make_result(
      Shape{n, frames, cout}, std::move(y), {x, weight, bias},
      [xn = x.node_ptr(), wn = weight.node_ptr(), bn = bias.defined() ? bias.node_ptr() : nullptr,
       packed = std::move(packed), for_each_block, n, frames, cin, cout, taps](const NodeT<T>& out) {
        const T* dy = out.grad.data();
        std::vector<T> dpacked;
        if (wn->requires_grad) dpacked.assign(taps * cout * cin, T(0));
        T* dx = xn->requires_grad ? xn->ensure_grad().data() : nullptr;
        for_each_block([&](std::size_t s, std::size_t k, std::size_t out_t, std::size_t in_t,
                           std::size_t len) {
          const T* dyb = dy + (s * frames + out_t) * cout;
          if (dx) {
            detail::gemm_nn(dyb, packed.data() + k * cout * cin, dx + (s * frames + in_t) * cin, len,
                            cout, cin);
          }
          if (!dpacked.empty()) {
            detail::gemm_tn(dyb, xn->values.data() + (s * frames + in_t) * cin,
                            dpacked.data() + k * cout * cin, cout, len, cin);
          }
        });
        if (!dpacked.empty()) {
          auto& dw = wn->ensure_grad();
          for (std::size_t o = 0; o < cout; ++o) {
            for (std::size_t i = 0; i < cin; ++i) {
              for (std::size_t k = 0; k < taps; ++k) {
                dw[(o * cin + i) * taps + k] += dpacked[(k * cout + o) * cin + i];
              }
            }
          }
        }
        if (bn && bn->requires_grad) {
          auto& db = bn->ensure_grad();
          for (std::size_t r = 0; r < n * frames; ++r) {
            for (std::size_t o = 0; o < cout; ++o) db[o] += dy[r * cout + o];
          }
        }
      });
}

template <typename T>
PoolResult<T> max_pool(const Tensor<T>& x, std::size_t axis) {
  const Shape& shape = x.shape();
  if (axis >= shape.size()) {
    throw DimensionError("max_pool: axis " + std::to_string(axis) + " for shape " + shape_str(shape));
  }
  std::size_t outer = 1;
  std::size_t inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t len = shape[axis];

  std::vector<T> y(outer * inner);
  std::vector<std::size_t> arg(outer * inner, 0);
  const T* xv = x.values().data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      std::size_t best = 0;
      T best_v = xv[o * len * inner + i];
      for (std::size_t l = 1; l < len; ++l) {
        T v = xv[(o * len + l) * inner + i];
        if (v > best_v) {
          best_v = v;
          best = l;
        }
      }
      y[o * inner + i] = best_v;
      arg[o * inner + i] = best;
    }
  }
  Shape out_shape = shape;
  out_shape[axis] = 1;
  PoolResult<T> result;
  result.argmax = arg;
  result.output = Tensor<T>::make_result(
      std::move(out_shape), std::move(y), {x},
      [xn = x.node_ptr(), arg = std::move(arg), inner, len](const NodeT<T>& out) {
        auto& g = xn->ensure_grad();
        for (std::size_t j = 0; j < arg.size(); ++j) {
          const std::size_t o = j / inner;
          const std::size_t i = j % inner;
          g[(o * len + arg[j]) * inner + i] += out.grad[j];
        }
      });
  return result;
}

template <typename T>
Tensor<T> cross_entropy_label_smoothed(const Tensor<T>& logits, std::span<const int> labels, T epsilon) {
  if (logits.rank() != 2) {
    throw DimensionError("cross_entropy: logits must be [N, K], got " + shape_str(logits.shape()));
  }
  const std::size_t n = logits.dim(0);
  const std::size_t k = logits.dim(1);
  if (labels.size() != n) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " rows");
  }
  if (!(epsilon >= T(0) && epsilon < T(1))) {
    throw ConfigError("cross_entropy: smoothing factor must lie in [0, 1)");
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= k) {
      throw DataError("cross_entropy: label " + std::to_string(labels[r]) + " outside [0, " +
                      std::to_string(k) + ")");
    }
  }
  const T off = epsilon / static_cast<T>(k);
  const T on = T(1) - epsilon + off;
  std::vector<T> probs(n * k);
  T loss = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const T* z = logits.values().data() + r * k;
    const T mx = *std::max_element(z, z + k);
    T total = 0;
    for (std::size_t j = 0; j < k; ++j) total += std::exp(z[j] - mx);
    const T log_norm = mx + std::log(total);
    for (std::size_t j = 0; j < k; ++j) {
      const T logp = z[j] - log_norm;
      probs[r * k + j] = std::exp(logp);
      const T q = (static_cast<int>(j) == labels[r]) ? on : off;
      loss -= q * logp;
    }
  }
  loss /= static_cast<T>(n);
  std::vector<int> targets(labels.begin(), labels.end());
  return Tensor<T>::make_result(
      Shape{1}, std::vector<T>{loss}, {logits},
      [ln = logits.node_ptr(), probs = std::move(probs), targets = std::move(targets), n, k, on,
       off](const NodeT<T>& out) {
        auto& g = ln->ensure_grad();
        const T s = out.grad[0] / static_cast<T>(n);
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t j = 0; j < k; ++j) {
            const T q = (static_cast<int>(j) == targets[r]) ? on : off;
            g[r * k + j] += s * (probs[r * k + j] - q);
          }
        }
      });
}

template <typename T>
Tensor<T> one_hot(std::span<const int> indices, std::size_t depth) {
  std::vector<T> v(indices.size() * depth, T(0));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] < 0 || static_cast<std::size_t>(indices[r]) >= depth) {
      throw DataError("one_hot: index " + std::to_string(indices[r]) + " outside [0, " +
                      std::to_string(depth) + ")");
    }
    v[r * depth + static_cast<std::size_t>(indices[r])] = T(1);
  }
  return Tensor<T>(Shape{indices.size(), depth}, std::move(v));
}

#define SGN_INSTANTIATE_OPS(T)                                                                  \
  template Tensor<T> affine(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> batched_matmul(const Tensor<T>&, const Tensor<T>&, bool);                  \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                   \
  template Tensor<T> add_all(std::span<const Tensor<T>>);                                       \
  template Tensor<T> scale(const Tensor<T>&, T);                                                \
  template Tensor<T> broadcast_to(const Tensor<T>&, const Shape&);                              \
  template Tensor<T> concat_last(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                          \
  template Tensor<T> relu(const Tensor<T>&);                                                    \
  template Tensor<T> softmax_last(const Tensor<T>&);                                            \
  template Tensor<T> softmax_rows(const Tensor<T>&);                                            \
  template Tensor<T> sum(const Tensor<T>&);                                                     \
  template Tensor<T> temporal_conv(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);       \
  template PoolResult<T> max_pool(const Tensor<T>&, std::size_t);                               \
  template Tensor<T> cross_entropy_label_smoothed(const Tensor<T>&, std::span<const int>, T);   \
  template Tensor<T> one_hot(std::span<const int>, std::size_t);

SGN_INSTANTIATE_OPS(float)
SGN_INSTANTIATE_OPS(double)

}  // namespace sgn
