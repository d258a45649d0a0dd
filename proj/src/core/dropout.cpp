// SPDX-License-Identifier: Apache-2.0
#include "core/dropout.hpp"

namespace sentigru {

template <class T>
DropoutLayer<T>::DropoutLayer(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

template <class T>
Tensor<T> DropoutLayer<T>::forward(const Tensor<T>& x, Mode mode, Rng& rng,
                                   Tensor<T>* mask) const {
  if (mode == Mode::kInfer || rate_ == 0.0) {
    if (mask) *mask = Tensor<T>(x.shape(), T{1});
    return x;
  }
  const T scale = static_cast<T>(1.0 / (1.0 - rate_));
  Tensor<T> keep(x.shape());
  Tensor<T> out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    keep[i] = rng.uniform() < rate_ ? T{0} : scale;
    out[i] *= keep[i];
  }
  if (mask) *mask = std::move(keep);
  return out;
}

template <class T>
Tensor<T> DropoutLayer<T>::backward(const Tensor<T>& grad_out,
                                    const Tensor<T>& mask) const {
  Tensor<T> grad = grad_out;
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i];
  return grad;
}

template class DropoutLayer<float>;
template class DropoutLayer<double>;

}  // namespace sentigru
