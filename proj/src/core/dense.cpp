// SPDX-License-Identifier: Apache-2.0
#include "core/dense.hpp"

#include "core/ops.hpp"

namespace sentigru {

template <class T>
DenseLayer<T>::DenseLayer(std::size_t in, std::size_t out)
    : weight({in, out}),
      bias({out}),
      weight_grad({in, out}),
      bias_grad({out}) {}

template <class T>
void DenseLayer<T>::initialize(Rng& rng) {
  fill_glorot_uniform(weight, rng);
  bias.fill(T{0});
}

template <class T>
Tensor<T> DenseLayer<T>::forward(const Tensor<T>& x) const {
  if (x.rank() != 2 || x.dim(1) != in_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "dense layer expects [B x " + std::to_string(in_dim()) +
                    "], got " + shape_string(x.shape()));
  }
  Tensor<T> out = matmul(x, weight);
  for (std::size_t b = 0; b < out.dim(0); ++b) {
    for (std::size_t j = 0; j < out_dim(); ++j) out.at(b, j) += bias[j];
  }
  return out;
}

template <class T>
Tensor<T> DenseLayer<T>::backward(const Tensor<T>& grad_out,
                                  const Tensor<T>& input) {
  gemm(input, true, grad_out, false, weight_grad, true);
  for (std::size_t b = 0; b < grad_out.dim(0); ++b) {
    for (std::size_t j = 0; j < out_dim(); ++j) bias_grad[j] += grad_out.at(b, j);
  }
  Tensor<T> grad_x;
  gemm(grad_out, false, weight, true, grad_x);
  return grad_x;
}

template <class T>
void DenseLayer<T>::collect(const std::string& prefix,
                            std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".weight", &weight, &weight_grad});
  out.push_back({prefix + ".bias", &bias, &bias_grad});
}

template class DenseLayer<float>;
template class DenseLayer<double>;

}  // namespace sentigru
