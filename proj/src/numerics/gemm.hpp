#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace sgn::detail {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using MutMap = Eigen::Map<RowMatrix<T>>;

// C[m,n] += A[m,k] B[k,n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  MutMap<T>(c, m, n).noalias() += ConstMap<T>(a, m, k) * ConstMap<T>(b, k, n);
}

// C[m,n] += A[m,k] B[n,k]^T
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  MutMap<T>(c, m, n).noalias() += ConstMap<T>(a, m, k) * ConstMap<T>(b, n, k).transpose();
}

// C[m,n] += A[k,m]^T B[k,n]
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  MutMap<T>(c, m, n).noalias() += ConstMap<T>(a, k, m).transpose() * ConstMap<T>(b, k, n);
}

}  // namespace sgn::detail
