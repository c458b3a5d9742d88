#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sgn/numerics/tensor.hpp"

namespace sgn {

// Differentiable primitives. All tensors are row-major with the feature axis last.

// y = x W^T + b over the trailing axis. x: [..., Din], W: [Dout, Din], b: [Dout] or undefined.
template <typename T>
Tensor<T> affine(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias = {});

// Batched matrix product over all leading axes: a [..., M, K] times b [..., K, N]
// (or b [..., N, K] when transpose_b).
template <typename T>
Tensor<T> batched_matmul(const Tensor<T>& a, const Tensor<T>& b, bool transpose_b = false);

// a + b where b broadcasts to a's shape (right-aligned, size-1 or missing axes repeat).
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> add_all(std::span<const Tensor<T>> terms);

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor);

// Repeats x to `shape` under the same broadcasting rule as add().
template <typename T>
Tensor<T> broadcast_to(const Tensor<T>& x, const Shape& shape);

// Concatenation along the trailing axis; leading extents must agree.
template <typename T>
Tensor<T> concat_last(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

template <typename T>
Tensor<T> relu(const Tensor<T>& x);

// Softmax over the trailing axis of any tensor.
template <typename T>
Tensor<T> softmax_last(const Tensor<T>& x);

// Softmax over each row of a matrix [R, C].
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& x);

template <typename T>
Tensor<T> sum(const Tensor<T>& x);

// Same-length temporal convolution on channel-last input.
// x: [N, T, Cin], weight: [Cout, Cin, K] with odd K, bias: [Cout] or undefined.
// Zero padding of (K-1)/2 frames on both sides.
template <typename T>
Tensor<T> temporal_conv(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias = {});

template <typename T>
struct PoolResult {
  Tensor<T> output;                  // input shape with `axis` reduced to 1
  std::vector<std::size_t> argmax;   // index along `axis` per output element
};

// Max over one axis. Ties resolve to the lowest index; backward routes the
// incoming gradient to the recorded argmax positions only.
template <typename T>
PoolResult<T> max_pool(const Tensor<T>& x, std::size_t axis);

// Mean over the batch of -sum_k q_k log softmax(logits)_k with
// q = (1 - epsilon) * onehot(label) + epsilon / K. logits: [N, K]. Returns shape [1].
template <typename T>
Tensor<T> cross_entropy_label_smoothed(const Tensor<T>& logits, std::span<const int> labels,
                                       T epsilon);

// Rows of the identity selected by `indices`, shaped [indices.size(), depth]. No gradient.
template <typename T>
Tensor<T> one_hot(std::span<const int> indices, std::size_t depth);

}  // namespace sgn
