// SPDX-License-Identifier: Apache-2.0
//
// The classifier stack:
//
//   Embedding -> Dropout -> BiGRU(120, seq) -> BiGRU(64, seq)
//             -> BatchNorm -> BiGRU(64, last) -> Dense(6)
//
// With the default configuration the per-layer parameter counts are
// 2,500,000 / 0 / 123,840 / 117,504 / 512 / 74,496 / 774.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/batch_norm.hpp"
#include "core/corpus.hpp"
#include "core/dense.hpp"
#include "core/dropout.hpp"
#include "core/embedding.hpp"
#include "core/gru.hpp"

namespace sentigru {

struct ModelConfig {
  std::size_t vocab_size = 50000;
  std::size_t embed_dim = 50;
  std::size_t seq_len = 79;
  std::array<std::size_t, 3> gru_units = {120, 64, 64};
  double dropout_rate = 0.3;
  std::size_t num_classes = kNumLabels;
  double batchnorm_momentum = 0.9;
  double batchnorm_epsilon = 1e-5;

  static ModelConfig published() { return ModelConfig{}; }
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct SummaryRow {
  std::string name;
  std::string type;
  /// Leading batch dimension omitted.
  Shape output_shape;
  std::size_t params = 0;

  /// e.g. "(None, 79, 240)".
  std::string shape_text() const;
};

template <class T>
struct ModelCache {
  IdBatch ids;
  Tensor<T> dropout_mask;
  Tensor<T> dropout_out;
  BidirectionalCache<T> gru1, gru2, gru3;
  BatchNormCache<T> batch_norm;
  Tensor<T> features;  // input of the dense layer
};

template <class T>
class Model {
 public:
  /// Builds and initialises the stack deterministically from `seed`.
  Model(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  /// Inference-mode logits [B x num_classes]: dropout off, batch norm on
  /// moving statistics. Does not touch the model.
  Tensor<T> infer(const IdBatch& ids) const;

  /// Training-mode logits. Draws dropout masks from `rng`, updates the batch
  /// norm moving statistics and records everything backward needs.
  Tensor<T> forward_train(const IdBatch& ids, Rng& rng, ModelCache<T>& cache);

  Tensor<T> forward(const IdBatch& ids, Mode mode, Rng& rng);

  /// Accumulates dL/dparams for the pass recorded in `cache`.
  void backward(const Tensor<T>& grad_logits, const ModelCache<T>& cache);

  void zero_grad();

  /// Trainable parameters in a fixed order.
  std::vector<ParamRef<T>> parameters();

  /// Every persistent tensor (trainable and moving statistics) in a fixed
  /// order, for serialization.
  std::vector<std::pair<std::string, Tensor<T>*>> state();
  std::vector<std::pair<std::string, const Tensor<T>*>> state() const;

  std::vector<SummaryRow> summary() const;
  std::size_t param_count() const;

  EmbeddingLayer<T> embedding;
  DropoutLayer<T> dropout;
  BidirectionalGru<T> gru1;
  BidirectionalGru<T> gru2;
  BatchNormLayer<T> batch_norm;
  BidirectionalGru<T> gru3;
  DenseLayer<T> dense;

 private:
  void check_input(const IdBatch& ids) const;

  ModelConfig config_;
};

struct Prediction {
  int label = 0;
  std::string name;
  std::array<double, kNumLabels> probabilities{};
};

/// A model bundled with the preprocessing state it was trained with.
template <class T>
struct Classifier {
  Model<T> model;
  Vocabulary vocab;
  StopList stoplist;
};

/// clean -> tokenize -> stopword filter -> encode -> infer -> softmax ->
/// argmax (lowest class code on ties).
template <class T>
Prediction predict(const Classifier<T>& classifier, std::string_view raw_text);

/// Argmax with ties resolved to the lowest index.
template <class T>
std::size_t argmax_row(const Tensor<T>& logits, std::size_t row);

/// Packs equal-length encoded sequences into an id batch.
IdBatch make_batch(std::span<const EncodedSequence> sequences);

}  // namespace sentigru
