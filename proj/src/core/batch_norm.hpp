// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "core/layer_common.hpp"

namespace sentigru {

template <class T>
struct BatchNormCache {
  Tensor<T> normalized;     // x-hat, same shape as the input
  std::vector<T> inv_std;   // per channel
};

/// Normalises over every axis but the last (channels). Training uses the
/// biased batch variance and folds it into the moving statistics as
/// moving = momentum * moving + (1 - momentum) * batch.
template <class T>
class BatchNormLayer {
 public:
  explicit BatchNormLayer(std::size_t channels, double momentum = 0.9,
                          double epsilon = 1e-5);

  Tensor<T> forward_train(const Tensor<T>& x, BatchNormCache<T>* cache);
  Tensor<T> forward_infer(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& grad_out, const BatchNormCache<T>& cache);

  std::size_t channels() const { return gamma.size(); }
  /// gamma, beta and both moving statistics.
  std::size_t param_count() const { return 4 * channels(); }
  double momentum() const { return momentum_; }
  double epsilon() const { return epsilon_; }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

  Tensor<T> gamma;
  Tensor<T> beta;
  Tensor<T> moving_mean;
  Tensor<T> moving_var;
  Tensor<T> gamma_grad;
  Tensor<T> beta_grad;

 private:
  std::size_t rows_of(const Tensor<T>& x) const;

  double momentum_;
  double epsilon_;
};

}  // namespace sentigru
