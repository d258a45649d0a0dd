// SPDX-License-Identifier: Apache-2.0
#include "core/embedding.hpp"

#include <algorithm>

namespace sentigru {

template <class T>
EmbeddingLayer<T>::EmbeddingLayer(std::size_t vocab_size,
                                  std::size_t embed_dim)
    : weight({vocab_size, embed_dim}), weight_grad({vocab_size, embed_dim}) {}

template <class T>
void EmbeddingLayer<T>::initialize(Rng& rng) {
  fill_uniform(weight, rng, 0.05);
}

template <class T>
Tensor<T> EmbeddingLayer<T>::forward(const IdBatch& ids) const {
  const std::size_t dim = embed_dim();
  Tensor<T> out({ids.batch, ids.steps, dim});
  for (std::size_t i = 0; i < ids.ids.size(); ++i) {
    const std::uint32_t id = ids.ids[i];
    if (id >= vocab_size()) {
      throw Error(ErrorCode::kOutOfRange,
                  "token id " + std::to_string(id) +
                      " outside embedding of size " +
                      std::to_string(vocab_size()));
    }
    std::copy_n(weight.data() + id * dim, dim, out.data() + i * dim);
  }
  return out;
}

template <class T>
void EmbeddingLayer<T>::backward(const IdBatch& ids, const Tensor<T>& grad_out) {
  const std::size_t dim = embed_dim();
  for (std::size_t i = 0; i < ids.ids.size(); ++i) {
    T* row = weight_grad.data() + ids.ids[i] * dim;
    const T* g = grad_out.data() + i * dim;
    for (std::size_t k = 0; k < dim; ++k) row[k] += g[k];
  }
}

template <class T>
void EmbeddingLayer<T>::collect(const std::string& prefix,
                                std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".weight", &weight, &weight_grad});
}

template class EmbeddingLayer<float>;
template class EmbeddingLayer<double>;

}  // namespace sentigru
