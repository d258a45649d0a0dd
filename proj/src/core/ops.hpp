// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "core/tensor.hpp"

namespace sentigru {

enum class Activation { kSigmoid, kTanh, kSoftmax };

/// c = op(a) * op(b) (+ c when accumulate). Both operands are 2-D; op is
/// either identity or transpose. Every output element is summed over the
/// inner index in increasing order, so results are bitwise reproducible.
template <class T>
void gemm(const Tensor<T>& a, bool transpose_a, const Tensor<T>& b,
          bool transpose_b, Tensor<T>& c, bool accumulate = false);

/// Standard matrix product of [m x k] and [k x n].
template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

template <class T>
T sigmoid(T x);

/// Elementwise sigmoid/tanh, or softmax over the last axis with max
/// subtraction.
template <class T>
Tensor<T> activate(const Tensor<T>& x, Activation kind);

/// In-place softmax of one contiguous slice.
template <class T>
void softmax_inplace(T* values, std::size_t count);

}  // namespace sentigru
