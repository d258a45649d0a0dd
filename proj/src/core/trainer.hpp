// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/model.hpp"

namespace sentigru {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 64;
  AdamConfig adam;
  std::uint64_t seed = 42;
  double train_fraction = 0.8;
  bool stratify = false;
  /// Global-norm gradient clip; 0 disables it.
  double clip_norm = 0.0;
  /// When false every EpochRecord reports 0 seconds, which keeps history
  /// files byte-identical across runs.
  bool record_wall_time = true;

  void validate() const;
};

template <class T>
struct OptimizerState {
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;
  std::uint64_t step = 0;
};

/// One adaptive-moment update over every parameter, using the gradients
/// stored alongside them. Moments start at zero and are bias corrected.
template <class T>
void adam_step(std::span<const ParamRef<T>> params, OptimizerState<T>& state,
               const AdamConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct EpochStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// One pass over `data` in a freshly shuffled order. The final partial batch
/// is kept. Loss is averaged per sample; accuracy counts argmax hits of the
/// train-mode forward pass.
template <class T>
EpochStats train_epoch(Model<T>& model, std::span<const EncodedSequence> data,
                       OptimizerState<T>& optimizer, Rng& rng,
                       const TrainConfig& config);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<int> truth;
  std::vector<int> predicted;
};

/// Inference-mode evaluation in batches.
template <class T>
Evaluation evaluate(const Model<T>& model, std::span<const EncodedSequence> data,
                    std::size_t batch_size = 256);

struct FitResult {
  std::vector<EpochRecord> history;
  std::vector<EncodedSequence> train;
  std::vector<EncodedSequence> validation;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Splits `data` once, then trains for config.epochs epochs, scoring the
/// held-out part in inference mode after each epoch.
template <class T>
FitResult fit(Model<T>& model, std::span<const EncodedSequence> data,
              const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Sizes of consecutive batches covering n items.
std::vector<std::size_t> batch_sizes(std::size_t n, std::size_t batch_size);

}  // namespace sentigru
