// SPDX-License-Identifier: Apache-2.0
#include "core/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "core/loss.hpp"

namespace sentigru {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "invalid train config: " + what);
  };
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch size must be >= 1");
  if (!(adam.learning_rate >= 0.0)) fail("learning rate must be >= 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
  if (!(adam.epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail("train fraction must lie strictly between 0 and 1");
  }
  if (!(clip_norm >= 0.0)) fail("clip norm must be >= 0");
}

std::vector<std::size_t> batch_sizes(std::size_t n, std::size_t batch_size) {
  std::vector<std::size_t> sizes;
  for (std::size_t start = 0; start < n; start += batch_size) {
    sizes.push_back(std::min(batch_size, n - start));
  }
  return sizes;
}

template <class T>
void adam_step(std::span<const ParamRef<T>> params, OptimizerState<T>& state,
               const AdamConfig& config) {
  if (state.first_moment.size() != params.size()) {
    state.first_moment.clear();
    state.second_moment.clear();
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.value->shape());
      state.second_moment.emplace_back(p.value->shape());
    }
  }
  for (const auto& p : params) {
    for (T g : p.grad->values()) {
      if (!std::isfinite(g)) {
        throw Error(ErrorCode::kNonFinite,
                    "non-finite gradient for parameter '" + p.name + "'");
      }
    }
  }
  ++state.step;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& value = *params[i].value;
    const Tensor<T>& grad = *params[i].grad;
    Tensor<T>& m = state.first_moment[i];
    Tensor<T>& v = state.second_moment[i];
    if (m.shape() != value.shape()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "optimizer state does not match '" + params[i].name + "'");
    }
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      const double mk = b1 * m[k] + (1.0 - b1) * g;
      const double vk = b2 * v[k] + (1.0 - b2) * g * g;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      const double m_hat = static_cast<double>(m[k]) / correction1;
      const double v_hat = static_cast<double>(v[k]) / correction2;
      value[k] = static_cast<T>(
          value[k] - config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon));
    }
  }
}

namespace {

template <class T>
void clip_gradients(std::span<const ParamRef<T>> params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) {
    for (T g : p.grad->values()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const T scale = static_cast<T>(max_norm / norm);
  for (const auto& p : params) {
    for (T& g : p.grad->values()) g *= scale;
  }
}

std::vector<EncodedSequence> gather(std::span<const EncodedSequence> data,
                                    std::span<const std::size_t> order,
                                    std::size_t start, std::size_t count) {
  std::vector<EncodedSequence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(data[order[start + i]]);
  return out;
}

std::vector<int> labels_of(std::span<const EncodedSequence> batch) {
  std::vector<int> labels;
  labels.reserve(batch.size());
  for (const auto& s : batch) labels.push_back(s.label);
  return labels;
}

}  // namespace

template <class T>
EpochStats train_epoch(Model<T>& model, std::span<const EncodedSequence> data,
                       OptimizerState<T>& optimizer, Rng& rng,
                       const TrainConfig& config) {
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training data is empty");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  detail::shuffle(order, rng);

  auto params = model.parameters();
  ModelCache<T> cache;
  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::size_t start = 0;
  std::size_t batch_index = 0;
  for (const std::size_t count : batch_sizes(data.size(), config.batch_size)) {
    const auto batch = gather(data, order, start, count);
    const auto labels = labels_of(batch);
    model.zero_grad();
    const Tensor<T> logits = model.forward_train(make_batch(batch), rng, cache);
    const auto result = softmax_cross_entropy(logits, labels);
    if (!std::isfinite(result.loss)) {
      throw Error(ErrorCode::kNonFinite,
                  "non-finite training loss in batch " +
                      std::to_string(batch_index) + " (samples " +
                      std::to_string(start) + ".." +
                      std::to_string(start + count - 1) + ")");
    }
    model.backward(result.grad_logits, cache);
    if (config.clip_norm > 0.0) {
      clip_gradients<T>(params, config.clip_norm);
    }
    adam_step<T>(params, optimizer, config.adam);

    loss_sum += static_cast<double>(result.loss) * static_cast<double>(count);
    for (std::size_t b = 0; b < count; ++b) {
      if (static_cast<int>(argmax_row(logits, b)) == labels[b]) ++correct;
    }
    start += count;
    ++batch_index;
  }
  const double n = static_cast<double>(data.size());
  return {loss_sum / n, static_cast<double>(correct) / n};
}

template <class T>
Evaluation evaluate(const Model<T>& model, std::span<const EncodedSequence> data,
                    std::size_t batch_size) {
  Evaluation eval;
  if (data.empty()) return eval;
  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::size_t start = 0;
  for (const std::size_t count : batch_sizes(data.size(), batch_size)) {
    const auto batch = data.subspan(start, count);
    const auto labels = labels_of(batch);
    const Tensor<T> logits = model.infer(make_batch(batch));
    loss_sum += static_cast<double>(softmax_cross_entropy(logits, labels).loss) *
                static_cast<double>(count);
    for (std::size_t b = 0; b < count; ++b) {
      const int pred = static_cast<int>(argmax_row(logits, b));
      eval.truth.push_back(labels[b]);
      eval.predicted.push_back(pred);
      if (pred == labels[b]) ++correct;
    }
    start += count;
  }
  const double n = static_cast<double>(data.size());
  eval.loss = loss_sum / n;
  eval.accuracy = static_cast<double>(correct) / n;
  return eval;
}

template <class T>
FitResult fit(Model<T>& model, std::span<const EncodedSequence> data,
              const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  auto parts =
      split(data, config.train_fraction, config.seed, config.stratify);
  if (parts.train.empty() || parts.test.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "split left an empty partition (train " +
                    std::to_string(parts.train.size()) + ", validation " +
                    std::to_string(parts.test.size()) + ")");
  }
  FitResult result;
  // Independent stream from the one used by the split.
  Rng rng(config.seed ^ 0x5851f42d4c957f2dULL);
  OptimizerState<T> optimizer;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const EpochStats stats =
        train_epoch(model, parts.train, optimizer, rng, config);
    const Evaluation val = evaluate(model, parts.test);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - started;
    EpochRecord record{epoch,        stats.loss,   stats.accuracy,
                       val.loss,     val.accuracy,
                       config.record_wall_time ? elapsed.count() : 0.0};
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  result.train = std::move(parts.train);
  result.validation = std::move(parts.test);
  return result;
}

#define SENTIGRU_INSTANTIATE(T)                                                \
  template void adam_step<T>(std::span<const ParamRef<T>>, OptimizerState<T>&, \
                             const AdamConfig&);                               \
  template EpochStats train_epoch<T>(Model<T>&, std::span<const EncodedSequence>, \
                                     OptimizerState<T>&, Rng&,                 \
                                     const TrainConfig&);                      \
  template Evaluation evaluate<T>(const Model<T>&,                             \
                                  std::span<const EncodedSequence>,            \
                                  std::size_t);                                \
  template FitResult fit<T>(Model<T>&, std::span<const EncodedSequence>,       \
                            const TrainConfig&, const EpochCallback&);

SENTIGRU_INSTANTIATE(float)
SENTIGRU_INSTANTIATE(double)

#undef SENTIGRU_INSTANTIATE

}  // namespace sentigru
