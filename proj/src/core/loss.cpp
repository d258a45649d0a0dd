// SPDX-License-Identifier: Apache-2.0
#include "core/loss.hpp"

#include <algorithm>
#include <cmath>

namespace sentigru {

template <class T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits,
                                    std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "logits " + shape_string(logits.shape()) + " vs " +
                    std::to_string(labels.size()) + " labels");
  }
  const std::size_t batch = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  LossResult<T> result{T{0}, Tensor<T>(logits.shape())};
  const T inv_batch = T{1} / static_cast<T>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const int label = labels[b];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw Error(ErrorCode::kOutOfRange,
                  "label " + std::to_string(label) + " outside " +
                      std::to_string(classes) + " classes");
    }
    const T* row = logits.data() + b * classes;
    const T peak = *std::max_element(row, row + classes);
    T total{0};
    for (std::size_t k = 0; k < classes; ++k) total += std::exp(row[k] - peak);
    const T log_norm = peak + std::log(total);
    result.loss += log_norm - row[label];
    T* grad = result.grad_logits.data() + b * classes;
    for (std::size_t k = 0; k < classes; ++k) {
      const T p = std::exp(row[k] - log_norm);
      grad[k] = (p - (static_cast<std::size_t>(label) == k ? T{1} : T{0})) *
                inv_batch;
    }
  }
  result.loss *= inv_batch;
  return result;
}

template LossResult<float> softmax_cross_entropy<float>(const Tensor<float>&,
                                                        std::span<const int>);
template LossResult<double> softmax_cross_entropy<double>(
    const Tensor<double>&, std::span<const int>);

}  // namespace sentigru
