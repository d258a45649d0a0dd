// SPDX-License-Identifier: Apache-2.0
#include "core/model.hpp"

#include <sstream>

#include "core/ops.hpp"

namespace sentigru {

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "invalid model config: " + what);
  };
  if (vocab_size < 3) fail("vocab_size must be >= 3");
  if (embed_dim < 1) fail("embed_dim must be >= 1");
  if (seq_len < 1) fail("seq_len must be >= 1");
  for (std::size_t units : gru_units) {
    if (units < 1) fail("gru units must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    fail("dropout rate must lie in [0, 1)");
  }
  if (num_classes != kNumLabels) {
    fail("num_classes must be " + std::to_string(kNumLabels));
  }
  if (!(batchnorm_momentum >= 0.0 && batchnorm_momentum < 1.0)) {
    fail("batch norm momentum must lie in [0, 1)");
  }
  if (!(batchnorm_epsilon > 0.0)) fail("batch norm epsilon must be > 0");
}

std::string SummaryRow::shape_text() const {
  std::ostringstream out;
  out << "(None";
  for (std::size_t d : output_shape) out << ", " << d;
  out << ')';
  return out.str();
}

namespace {

const ModelConfig& validated(const ModelConfig& config) {
  config.validate();
  return config;
}

}  // namespace

template <class T>
Model<T>::Model(const ModelConfig& config, std::uint64_t seed)
    : embedding(validated(config).vocab_size, config.embed_dim),
      dropout(config.dropout_rate),
      gru1(config.embed_dim, config.gru_units[0], true),
      gru2(2 * config.gru_units[0], config.gru_units[1], true),
      batch_norm(2 * config.gru_units[1], config.batchnorm_momentum,
                 config.batchnorm_epsilon),
      gru3(2 * config.gru_units[1], config.gru_units[2], false),
      dense(2 * config.gru_units[2], config.num_classes),
      config_(config) {
  Rng rng(seed);
  embedding.initialize(rng);
  gru1.initialize(rng);
  gru2.initialize(rng);
  gru3.initialize(rng);
  dense.initialize(rng);
}

template <class T>
void Model<T>::check_input(const IdBatch& ids) const {
  if (ids.steps != config_.seq_len) {
    throw Error(ErrorCode::kShapeMismatch,
                "input has " + std::to_string(ids.steps) +
                    " steps, model expects " + std::to_string(config_.seq_len));
  }
  if (ids.batch == 0 || ids.ids.size() != ids.batch * ids.steps) {
    throw Error(ErrorCode::kShapeMismatch, "malformed id batch");
  }
}

template <class T>
Tensor<T> Model<T>::infer(const IdBatch& ids) const {
  check_input(ids);
  Tensor<T> x = embedding.forward(ids);
  x = gru1.forward(x, nullptr);
  x = gru2.forward(x, nullptr);
  x = batch_norm.forward_infer(x);
  x = gru3.forward(x, nullptr);
  return dense.forward(x);
}

template <class T>
Tensor<T> Model<T>::forward_train(const IdBatch& ids, Rng& rng,
                                  ModelCache<T>& cache) {
  check_input(ids);
  cache.ids = ids;
  Tensor<T> x = embedding.forward(ids);
  x = dropout.forward(x, Mode::kTrain, rng, &cache.dropout_mask);
  x = gru1.forward(x, &cache.gru1);
  x = gru2.forward(x, &cache.gru2);
  x = batch_norm.forward_train(x, &cache.batch_norm);
  cache.features = gru3.forward(x, &cache.gru3);
  return dense.forward(cache.features);
}

template <class T>
Tensor<T> Model<T>::forward(const IdBatch& ids, Mode mode, Rng& rng) {
  if (mode == Mode::kInfer) return infer(ids);
  ModelCache<T> cache;
  return forward_train(ids, rng, cache);
}

template <class T>
void Model<T>::backward(const Tensor<T>& grad_logits,
                        const ModelCache<T>& cache) {
  Tensor<T> g = dense.backward(grad_logits, cache.features);
  g = gru3.backward(g, cache.gru3);
  g = batch_norm.backward(g, cache.batch_norm);
  g = gru2.backward(g, cache.gru2);
  g = gru1.backward(g, cache.gru1);
  g = dropout.backward(g, cache.dropout_mask);
  embedding.backward(cache.ids, g);
}

template <class T>
void Model<T>::zero_grad() {
  for (auto& p : parameters()) p.grad->fill(T{0});
}

template <class T>
std::vector<ParamRef<T>> Model<T>::parameters() {
  std::vector<ParamRef<T>> out;
  embedding.collect("embedding", out);
  gru1.collect("bidirectional_1", out);
  gru2.collect("bidirectional_2", out);
  batch_norm.collect("batch_normalization", out);
  gru3.collect("bidirectional_3", out);
  dense.collect("dense", out);
  return out;
}

template <class T>
std::vector<std::pair<std::string, Tensor<T>*>> Model<T>::state() {
  std::vector<std::pair<std::string, Tensor<T>*>> out;
  for (auto& p : parameters()) {
    out.emplace_back(p.name, p.value);
    if (p.name == "batch_normalization.beta") {
      out.emplace_back("batch_normalization.moving_mean",
                       &batch_norm.moving_mean);
      out.emplace_back("batch_normalization.moving_var",
                       &batch_norm.moving_var);
    }
  }
  return out;
}

template <class T>
std::vector<std::pair<std::string, const Tensor<T>*>> Model<T>::state() const {
  std::vector<std::pair<std::string, const Tensor<T>*>> out;
  for (auto& [name, tensor] : const_cast<Model&>(*this).state()) {
    out.emplace_back(name, tensor);
  }
  return out;
}

template <class T>
std::vector<SummaryRow> Model<T>::summary() const {
  const std::size_t t = config_.seq_len;
  return {
      {"embedding", "Embedding", {t, embedding.embed_dim()},
       embedding.param_count()},
      {"dropout", "Dropout", {t, embedding.embed_dim()}, dropout.param_count()},
      {"bidirectional_1", "Bidirectional", {t, gru1.output_dim()},
       gru1.param_count()},
      {"bidirectional_2", "Bidirectional", {t, gru2.output_dim()},
       gru2.param_count()},
      {"batch_normalization", "BatchNormalization", {t, batch_norm.channels()},
       batch_norm.param_count()},
      {"bidirectional_3", "Bidirectional", {gru3.output_dim()},
       gru3.param_count()},
      {"dense", "Dense", {dense.out_dim()}, dense.param_count()},
  };
}

template <class T>
std::size_t Model<T>::param_count() const {
  std::size_t total = 0;
  for (const auto& row : summary()) total += row.params;
  return total;
}

template <class T>
std::size_t argmax_row(const Tensor<T>& logits, std::size_t row) {
  const std::size_t width = logits.dim(1);
  const T* p = logits.data() + row * width;
  std::size_t best = 0;
  for (std::size_t k = 1; k < width; ++k) {
    if (p[k] > p[best]) best = k;
  }
  return best;
}

IdBatch make_batch(std::span<const EncodedSequence> sequences) {
  IdBatch batch;
  batch.batch = sequences.size();
  batch.steps = sequences.empty() ? 0 : sequences.front().ids.size();
  batch.ids.reserve(batch.batch * batch.steps);
  for (const auto& seq : sequences) {
    if (seq.ids.size() != batch.steps) {
      throw Error(ErrorCode::kShapeMismatch,
                  "sequences in a batch must share one length");
    }
    batch.ids.insert(batch.ids.end(), seq.ids.begin(), seq.ids.end());
  }
  return batch;
}

template <class T>
Prediction predict(const Classifier<T>& classifier, std::string_view raw_text) {
  const auto tokens = preprocess(raw_text, classifier.stoplist);
  const std::size_t seq_len = classifier.model.config().seq_len;
  IdBatch batch{1, seq_len, encode(tokens, classifier.vocab, seq_len)};
  Tensor<T> probs = activate(classifier.model.infer(batch), Activation::kSoftmax);
  Prediction out;
  out.label = static_cast<int>(argmax_row(probs, 0));
  out.name = std::string(kLabelNames[static_cast<std::size_t>(out.label)]);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    out.probabilities[k] = static_cast<double>(probs[k]);
  }
  return out;
}

template class Model<float>;
template class Model<double>;
template Prediction predict<float>(const Classifier<float>&, std::string_view);
template Prediction predict<double>(const Classifier<double>&, std::string_view);
template std::size_t argmax_row<float>(const Tensor<float>&, std::size_t);
template std::size_t argmax_row<double>(const Tensor<double>&, std::size_t);

}  // namespace sentigru
