// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace sentigru {

enum class Mode { kTrain, kInfer };

/// Row-major [batch x steps] token ids.
struct IdBatch {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::vector<std::uint32_t> ids;

  std::uint32_t at(std::size_t b, std::size_t t) const {
    return ids[b * steps + t];
  }
};

template <class T>
void fill_uniform(Tensor<T>& t, Rng& rng, double limit) {
  for (T& v : t.values()) v = static_cast<T>(rng.uniform(-limit, limit));
}

/// Glorot/Xavier uniform: U(-sqrt(6/(fan_in+fan_out)), +...).
template <class T>
void fill_glorot_uniform(Tensor<T>& t, Rng& rng);

/// Rows of the [rows x cols] matrix are orthonormal when rows <= cols,
/// columns otherwise. Built by modified Gram-Schmidt on a Gaussian draw.
template <class T>
void fill_orthogonal(Tensor<T>& t, Rng& rng);

}  // namespace sentigru
