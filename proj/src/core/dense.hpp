// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "core/layer_common.hpp"

namespace sentigru {

/// Affine map x W + b producing raw logits.
template <class T>
class DenseLayer {
 public:
  DenseLayer(std::size_t in, std::size_t out);

  void initialize(Rng& rng);
  Tensor<T> forward(const Tensor<T>& x) const;
  /// `input` is the tensor passed to forward.
  Tensor<T> backward(const Tensor<T>& grad_out, const Tensor<T>& input);

  std::size_t in_dim() const { return weight.dim(0); }
  std::size_t out_dim() const { return weight.dim(1); }
  std::size_t param_count() const { return weight.size() + bias.size(); }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

  Tensor<T> weight;  // [in x out]
  Tensor<T> bias;    // [out]
  Tensor<T> weight_grad;
  Tensor<T> bias_grad;
};

}  // namespace sentigru
