// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "core/layer_common.hpp"

namespace sentigru {

/// Inverted dropout: survivors are scaled by 1/(1-rate) during training so
/// inference is the identity.
template <class T>
class DropoutLayer {
 public:
  explicit DropoutLayer(double rate);

  /// The mask drawn in train mode is written to `mask` for backward.
  Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng& rng,
                    Tensor<T>* mask) const;
  Tensor<T> backward(const Tensor<T>& grad_out, const Tensor<T>& mask) const;

  double rate() const { return rate_; }
  std::size_t param_count() const { return 0; }

 private:
  double rate_;
};

}  // namespace sentigru
