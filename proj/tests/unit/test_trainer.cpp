// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "core/loss.hpp"
#include "core/pipeline.hpp"
#include "core/trainer.hpp"
#include "support/oracles.hpp"

using namespace sentigru;

namespace {

ModelConfig tiny_config(std::size_t vocab) {
  ModelConfig cfg;
  cfg.vocab_size = vocab;
  cfg.embed_dim = 8;
  cfg.seq_len = 10;
  cfg.gru_units = {8, 6, 6};
  return cfg;
}

struct Encoded {
  Vocabulary vocab;
  std::vector<EncodedSequence> data;
};

Encoded synthetic(std::size_t n, std::uint64_t seed, std::size_t seq_len = 10) {
  LabeledCorpus corpus;
  for (const auto& r : oracle::synthetic_corpus(n, seed, 3)) {
    corpus.records.push_back({r.text, r.label});
  }
  Encoded e{corpus_vocabulary(corpus, StopList::english(), 64), {}};
  e.data = encode_corpus(corpus, StopList::english(), e.vocab, seq_len);
  return e;
}

template <class T>
std::vector<Tensor<T>> snapshot(Model<T>& model) {
  std::vector<Tensor<T>> out;
  for (const auto& p : model.parameters()) out.push_back(*p.value);
  return out;
}

}  // namespace

TEST_CASE("adam examples") {
  Tensor<double> w({3}, std::vector<double>{1.0, -2.0, 0.5});
  Tensor<double> g({3}, 0.0);
  const std::vector<ParamRef<double>> params = {{"w", &w, &g}};
  OptimizerState<double> state;
  AdamConfig cfg;
  adam_step<double>(params, state, cfg);
  CHECK(w == Tensor<double>({3}, std::vector<double>{1.0, -2.0, 0.5}));
  CHECK(state.step == 1);

  // Constant gradient at t = 1: m_hat / sqrt(v_hat) = sign(g).
  OptimizerState<double> fresh;
  g = Tensor<double>({3}, std::vector<double>{0.3, -4.0, 1e-3});
  adam_step<double>(params, fresh, cfg);
  CHECK(w[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-9));
  CHECK(std::abs(w[2] - (0.5 - 1e-3)) < 1e-8);
}

TEST_CASE("adam matches a scalar oracle over ten steps") {
  Tensor<double> w({1}, 0.7);
  Tensor<double> g({1});
  const std::vector<ParamRef<double>> params = {{"w", &w, &g}};
  OptimizerState<double> state;
  AdamConfig cfg;
  cfg.learning_rate = 0.05;
  oracle::ScalarAdam ref;
  ref.lr = 0.05;
  double theta = 0.7;
  for (int t = 0; t < 10; ++t) {
    // Gradient of (w - 2)^2 plus a wobble so moments vary.
    g[0] = 2.0 * (w[0] - 2.0) + 0.1 * std::sin(t);
    const double ref_g = 2.0 * (theta - 2.0) + 0.1 * std::sin(t);
    adam_step<double>(params, state, cfg);
    theta = ref.update(theta, ref_g);
    CHECK(std::abs(w[0] - theta) < 1e-12);
  }
  CHECK(state.step == 10);
}

TEST_CASE("adam rejects non-finite gradients by name") {
  Tensor<float> w({2});
  Tensor<float> g({2}, std::vector<float>{0.0f, std::numeric_limits<float>::quiet_NaN()});
  OptimizerState<float> state;
  try {
    adam_step<float>(std::vector<ParamRef<float>>{{"dense.bias", &w, &g}}, state, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFinite);
    CHECK(std::string(e.what()).find("dense.bias") != std::string::npos);
  }
}

TEST_CASE("batch partitioning") {
  CHECK(batch_sizes(10, 4) == std::vector<std::size_t>{4, 4, 2});
  CHECK(batch_sizes(8, 4) == std::vector<std::size_t>{4, 4});
  CHECK(batch_sizes(3, 64) == std::vector<std::size_t>{3});
  CHECK(batch_sizes(0, 4).empty());
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.adam.beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.adam.learning_rate = -1e-3;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.train_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("zero learning rate leaves trainable parameters bitwise unchanged") {
  const auto e = synthetic(30, 1);
  Model<float> model(tiny_config(64), 3);
  const auto before = snapshot(model);
  OptimizerState<float> opt;
  TrainConfig cfg;
  cfg.adam.learning_rate = 0.0;
  cfg.batch_size = 4;
  Rng rng(1);
  train_epoch(model, std::span<const EncodedSequence>(e.data), opt, rng, cfg);
  const auto after = snapshot(model);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
}

TEST_CASE("train_epoch metrics equal a train-mode replay of the same batches") {
  const auto e = synthetic(22, 2);
  const TrainConfig cfg = [] {
    TrainConfig c;
    c.adam.learning_rate = 0.0;
    c.batch_size = 5;
    return c;
  }();
  Model<double> model(tiny_config(64), 4);
  Model<double> replay = model;
  OptimizerState<double> opt;
  Rng rng(9);
  const EpochStats stats =
      train_epoch(model, std::span<const EncodedSequence>(e.data), opt, rng, cfg);

  Rng mirror(9);
  std::vector<std::size_t> order(e.data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  detail::shuffle(order, mirror);
  double loss_sum = 0;
  std::size_t correct = 0, start = 0;
  for (std::size_t count : batch_sizes(e.data.size(), cfg.batch_size)) {
    std::vector<EncodedSequence> batch;
    std::vector<int> labels;
    for (std::size_t i = 0; i < count; ++i) {
      batch.push_back(e.data[order[start + i]]);
      labels.push_back(batch.back().label);
    }
    ModelCache<double> cache;
    const auto logits = replay.forward_train(make_batch(batch), mirror, cache);
    loss_sum += softmax_cross_entropy(logits, labels).loss * static_cast<double>(count);
    for (std::size_t b = 0; b < count; ++b)
      correct += static_cast<int>(argmax_row(logits, b)) == labels[b];
    start += count;
  }
  CHECK(stats.loss == doctest::Approx(loss_sum / e.data.size()).epsilon(1e-12));
  CHECK(stats.accuracy == static_cast<double>(correct) / e.data.size());
}

TEST_CASE("fit history and validation in inference mode") {
  const auto e = synthetic(40, 3);
  Model<float> model(tiny_config(64), 5);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  std::vector<EpochRecord> seen;
  const FitResult result =
      fit(model, std::span<const EncodedSequence>(e.data), cfg,
          [&](const EpochRecord& r) { seen.push_back(r); });
  REQUIRE(result.history.size() == 5);
  CHECK(seen == result.history);
  CHECK(result.train.size() == 32);
  CHECK(result.validation.size() == 8);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& r = result.history[i];
    CHECK(r.epoch == i + 1);
    CHECK(std::isfinite(r.train_loss));
    CHECK(r.train_loss >= 0);
    CHECK(r.val_loss >= 0);
    CHECK(r.train_accuracy >= 0);
    CHECK(r.train_accuracy <= 1);
    CHECK(r.val_accuracy >= 0);
    CHECK(r.val_accuracy <= 1);
  }
  const Evaluation manual =
      evaluate(model, std::span<const EncodedSequence>(result.validation));
  CHECK(manual.loss == result.history.back().val_loss);
  CHECK(manual.accuracy == result.history.back().val_accuracy);
}

TEST_CASE("fit with zero learning rate for one epoch") {
  const auto e = synthetic(30, 4);
  Model<float> model(tiny_config(64), 6);
  const auto before = snapshot(model);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.adam.learning_rate = 0.0;
  const FitResult result = fit(model, std::span<const EncodedSequence>(e.data), cfg);
  const auto after = snapshot(model);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
  // Only the batch-norm moving statistics moved; validation equals a direct
  // inference pass over the held-out records.
  const Evaluation direct =
      evaluate(model, std::span<const EncodedSequence>(result.validation));
  CHECK(result.history[0].val_loss == direct.loss);
  CHECK(result.history[0].val_accuracy == direct.accuracy);
}

TEST_CASE("fit is reproducible for a fixed seed") {
  const auto e = synthetic(36, 5);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.record_wall_time = false;
  Model<float> a(tiny_config(64), 7), b(tiny_config(64), 7);
  const auto ha = fit(a, std::span<const EncodedSequence>(e.data), cfg).history;
  const auto hb = fit(b, std::span<const EncodedSequence>(e.data), cfg).history;
  CHECK(ha == hb);
  const auto sa = snapshot(a), sb = snapshot(b);
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);

  cfg.clip_norm = 0.5;
  Model<float> c(tiny_config(64), 7);
  const auto hc = fit(c, std::span<const EncodedSequence>(e.data), cfg).history;
  CHECK(hc.size() == 2);
}

TEST_CASE("separable corpus: training loss falls over the first epochs") {
  const auto e = synthetic(60, 6);
  Model<float> model(tiny_config(64), 8);
  OptimizerState<float> opt;
  TrainConfig cfg;
  cfg.adam.learning_rate = 1e-2;
  cfg.batch_size = 16;
  Rng rng(3);
  std::vector<double> losses;
  for (int i = 0; i < 3; ++i) {
    losses.push_back(
        train_epoch(model, std::span<const EncodedSequence>(e.data), opt, rng, cfg).loss);
  }
  CHECK(losses[1] < losses[0]);
  CHECK(losses[2] < losses[1]);
}

TEST_CASE("fit errors") {
  const auto e = synthetic(6, 7);
  Model<float> model(tiny_config(64), 9);
  TrainConfig cfg;
  CHECK_THROWS_AS(fit(model, std::span<const EncodedSequence>(e.data.data(), 1), cfg), Error);
  cfg.train_fraction = 0.99;
  CHECK_THROWS_AS(fit(model, std::span<const EncodedSequence>(e.data), cfg), Error);
  OptimizerState<float> opt;
  Rng rng(1);
  CHECK_THROWS_AS(train_epoch(model, std::span<const EncodedSequence>(), opt, rng, TrainConfig{}),
                  Error);
}

TEST_CASE("overfit model classifies its training text") {
  LabeledCorpus corpus;
  corpus.records = {{"happy happy", 1}, {"gloomy rain", 0}, {"furious rage", 3}};
  const StopList& stop = StopList::english();
  Classifier<float> clf{Model<float>(tiny_config(16), 10),
                        corpus_vocabulary(corpus, stop, 16), stop};
  const auto data = encode_corpus(corpus, stop, clf.vocab, 10);
  OptimizerState<float> opt;
  TrainConfig cfg;
  cfg.adam.learning_rate = 1e-2;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    train_epoch(clf.model, std::span<const EncodedSequence>(data), opt, rng, cfg);
  }
  const Prediction p = predict(clf, "happy happy");
  CHECK(p.label == 1);
  CHECK(p.name == "joy");
}
