// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "core/tensor.hpp"

namespace sentigru {

template <class T>
struct LossResult {
  T loss{};
  Tensor<T> grad_logits;
};

/// Mean categorical cross-entropy of softmax(logits) with its gradient
/// (softmax - onehot) / B. Uses log-sum-exp.
template <class T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits,
                                    std::span<const int> labels);

}  // namespace sentigru
