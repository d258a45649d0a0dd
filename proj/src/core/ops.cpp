// SPDX-License-Identifier: Apache-2.0
#include "core/ops.hpp"

#include <algorithm>
#include <cmath>

namespace sentigru {

template <class T>
void gemm(const Tensor<T>& a, bool transpose_a, const Tensor<T>& b,
          bool transpose_b, Tensor<T>& c, bool accumulate) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw Error(ErrorCode::kShapeMismatch, "gemm operands must be 2-D");
  }
  const std::size_t m = transpose_a ? a.dim(1) : a.dim(0);
  const std::size_t k = transpose_a ? a.dim(0) : a.dim(1);
  const std::size_t kb = transpose_b ? b.dim(1) : b.dim(0);
  const std::size_t n = transpose_b ? b.dim(0) : b.dim(1);
  if (k != kb) {
    throw Error(ErrorCode::kShapeMismatch,
                "matmul inner dimensions disagree: " + shape_string(a.shape()) +
                    " x " + shape_string(b.shape()));
  }
  if (c.shape() != Shape{m, n}) {
    if (accumulate) {
      throw Error(ErrorCode::kShapeMismatch,
                  "gemm accumulator has shape " + shape_string(c.shape()));
    }
    c = Tensor<T>({m, n});
  } else if (!accumulate) {
    c.fill(T{0});
  }

  const T* pa = a.data();
  const T* pb = b.data();
  T* pc = c.data();
  const std::size_t lda = a.dim(1);
  const std::size_t ldb = b.dim(1);
  // i-k-j ordering: each c[i][j] still accumulates over k = 0..K-1 in order.
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = pc + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = transpose_a ? pa[p * lda + i] : pa[i * lda + p];
      if (!transpose_b) {
        const T* brow = pb + p * ldb;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      } else {
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * pb[j * ldb + p];
      }
    }
  }
}

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> c;
  gemm(a, false, b, false, c);
  return c;
}

template <class T>
T sigmoid(T x) {
  // Branch keeps exp() from overflowing for large |x|.
  if (x >= T{0}) {
    return T{1} / (T{1} + std::exp(-x));
  }
  const T e = std::exp(x);
  return e / (T{1} + e);
}

template <class T>
void softmax_inplace(T* values, std::size_t count) {
  const T peak = *std::max_element(values, values + count);
  T total{0};
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::exp(values[i] - peak);
    total += values[i];
  }
  for (std::size_t i = 0; i < count; ++i) values[i] /= total;
}

template <class T>
Tensor<T> activate(const Tensor<T>& x, Activation kind) {
  Tensor<T> out = x;
  switch (kind) {
    case Activation::kSigmoid:
      for (T& v : out.values()) v = sigmoid(v);
      break;
    case Activation::kTanh:
      for (T& v : out.values()) v = std::tanh(v);
      break;
    case Activation::kSoftmax: {
      if (out.empty()) break;
      const std::size_t width = out.shape().back();
      for (std::size_t start = 0; start < out.size(); start += width) {
        softmax_inplace(out.data() + start, width);
      }
      break;
    }
  }
  return out;
}

#define SENTIGRU_INSTANTIATE(T)                                              \
  template void gemm<T>(const Tensor<T>&, bool, const Tensor<T>&, bool,       \
                        Tensor<T>&, bool);                                    \
  template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);           \
  template T sigmoid<T>(T);                                                   \
  template void softmax_inplace<T>(T*, std::size_t);                          \
  template Tensor<T> activate<T>(const Tensor<T>&, Activation);

SENTIGRU_INSTANTIATE(float)
SENTIGRU_INSTANTIATE(double)

#undef SENTIGRU_INSTANTIATE

}  // namespace sentigru
