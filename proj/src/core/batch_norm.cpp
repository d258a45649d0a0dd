// SPDX-License-Identifier: Apache-2.0
#include "core/batch_norm.hpp"

#include <cmath>

namespace sentigru {

template <class T>
BatchNormLayer<T>::BatchNormLayer(std::size_t channels, double momentum,
                                  double epsilon)
    : gamma({channels}, T{1}),
      beta({channels}),
      moving_mean({channels}),
      moving_var({channels}, T{1}),
      gamma_grad({channels}),
      beta_grad({channels}),
      momentum_(momentum),
      epsilon_(epsilon) {}

template <class T>
std::size_t BatchNormLayer<T>::rows_of(const Tensor<T>& x) const {
  if (x.rank() < 2 || x.shape().back() != channels()) {
    throw Error(ErrorCode::kShapeMismatch,
                "batch norm over " + std::to_string(channels()) +
                    " channels got input " + shape_string(x.shape()));
  }
  return x.size() / channels();
}

template <class T>
Tensor<T> BatchNormLayer<T>::forward_train(const Tensor<T>& x,
                                           BatchNormCache<T>* cache) {
  const std::size_t rows = rows_of(x);
  const std::size_t c = channels();
  if (rows < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "batch norm training needs at least 2 samples per channel");
  }
  std::vector<T> mean(c, T{0});
  std::vector<T> var(c, T{0});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < c; ++k) mean[k] += x[i * c + k];
  }
  for (auto& m : mean) m /= static_cast<T>(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      const T d = x[i * c + k] - mean[k];
      var[k] += d * d;
    }
  }
  for (auto& v : var) v /= static_cast<T>(rows);

  std::vector<T> inv_std(c);
  for (std::size_t k = 0; k < c; ++k) {
    inv_std[k] = T{1} / std::sqrt(var[k] + static_cast<T>(epsilon_));
  }
  Tensor<T> normalized(x.shape());
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      const T xhat = (x[i * c + k] - mean[k]) * inv_std[k];
      normalized[i * c + k] = xhat;
      out[i * c + k] = gamma[k] * xhat + beta[k];
    }
  }
  const T keep = static_cast<T>(momentum_);
  const T take = static_cast<T>(1.0 - momentum_);
  for (std::size_t k = 0; k < c; ++k) {
    moving_mean[k] = keep * moving_mean[k] + take * mean[k];
    moving_var[k] = keep * moving_var[k] + take * var[k];
  }
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

template <class T>
Tensor<T> BatchNormLayer<T>::forward_infer(const Tensor<T>& x) const {
  const std::size_t rows = rows_of(x);
  const std::size_t c = channels();
  Tensor<T> out(x.shape());
  for (std::size_t k = 0; k < c; ++k) {
    const T inv_std =
        T{1} / std::sqrt(moving_var[k] + static_cast<T>(epsilon_));
    for (std::size_t i = 0; i < rows; ++i) {
      out[i * c + k] =
          gamma[k] * (x[i * c + k] - moving_mean[k]) * inv_std + beta[k];
    }
  }
  return out;
}

template <class T>
Tensor<T> BatchNormLayer<T>::backward(const Tensor<T>& grad_out,
                                      const BatchNormCache<T>& cache) {
  const std::size_t c = channels();
  const std::size_t rows = grad_out.size() / c;
  const Tensor<T>& xhat = cache.normalized;
  std::vector<T> sum_dxhat(c, T{0});
  std::vector<T> sum_dxhat_xhat(c, T{0});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      const T g = grad_out[i * c + k];
      const T dxhat = g * gamma[k];
      gamma_grad[k] += g * xhat[i * c + k];
      beta_grad[k] += g;
      sum_dxhat[k] += dxhat;
      sum_dxhat_xhat[k] += dxhat * xhat[i * c + k];
    }
  }
  const T count = static_cast<T>(rows);
  Tensor<T> grad_x(grad_out.shape());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      const T dxhat = grad_out[i * c + k] * gamma[k];
      grad_x[i * c + k] = cache.inv_std[k] / count *
                          (count * dxhat - sum_dxhat[k] -
                           xhat[i * c + k] * sum_dxhat_xhat[k]);
    }
  }
  return grad_x;
}

template <class T>
void BatchNormLayer<T>::collect(const std::string& prefix,
                                std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".gamma", &gamma, &gamma_grad});
  out.push_back({prefix + ".beta", &beta, &beta_grad});
}

template class BatchNormLayer<float>;
template class BatchNormLayer<double>;

}  // namespace sentigru
