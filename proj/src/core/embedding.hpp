// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "core/layer_common.hpp"

namespace sentigru {

template <class T>
class EmbeddingLayer {
 public:
  EmbeddingLayer(std::size_t vocab_size, std::size_t embed_dim);

  void initialize(Rng& rng);

  /// [B x T] ids -> [B x T x D].
  Tensor<T> forward(const IdBatch& ids) const;
  /// Scatter-adds the upstream gradient into the rows that were looked up.
  void backward(const IdBatch& ids, const Tensor<T>& grad_out);

  std::size_t vocab_size() const { return weight.dim(0); }
  std::size_t embed_dim() const { return weight.dim(1); }
  std::size_t param_count() const { return weight.size(); }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

  Tensor<T> weight;
  Tensor<T> weight_grad;
};

}  // namespace sentigru
