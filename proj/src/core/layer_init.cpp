// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "core/layer_common.hpp"

namespace sentigru {

template <class T>
void fill_glorot_uniform(Tensor<T>& t, Rng& rng) {
  const double fan_in = static_cast<double>(t.dim(0));
  const double fan_out = static_cast<double>(t.dim(1));
  fill_uniform(t, rng, std::sqrt(6.0 / (fan_in + fan_out)));
}

template <class T>
void fill_orthogonal(Tensor<T>& t, Rng& rng) {
  const std::size_t rows = t.dim(0);
  const std::size_t cols = t.dim(1);
  // Orthonormalise the `count` vectors of length `len`, then lay them out as
  // rows (rows <= cols) or columns.
  const std::size_t count = std::min(rows, cols);
  const std::size_t len = std::max(rows, cols);
  std::vector<std::vector<double>> basis(count, std::vector<double>(len));
  for (auto& v : basis) {
    for (double& x : v) x = rng.normal();
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < len; ++k) dot += basis[i][k] * basis[j][k];
      for (std::size_t k = 0; k < len; ++k) basis[i][k] -= dot * basis[j][k];
    }
    double norm = 0.0;
    for (double x : basis[i]) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : basis[i]) x /= norm;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      t.at(r, c) = static_cast<T>(rows <= cols ? basis[r][c] : basis[c][r]);
    }
  }
}

template void fill_glorot_uniform<float>(Tensor<float>&, Rng&);
template void fill_glorot_uniform<double>(Tensor<double>&, Rng&);
template void fill_orthogonal<float>(Tensor<float>&, Rng&);
template void fill_orthogonal<double>(Tensor<double>&, Rng&);

}  // namespace sentigru
