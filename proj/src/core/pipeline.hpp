// SPDX-License-Identifier: Apache-2.0
//
// End-to-end glue: raw corpus -> vocabulary -> encoded sequences -> fitted
// classifier, and the matching evaluation path for a trained classifier.
#pragma once

#include "core/metrics.hpp"
#include "core/model.hpp"
#include "core/trainer.hpp"

namespace sentigru {

/// Runs every record through preprocess + encode.
std::vector<EncodedSequence> encode_corpus(const LabeledCorpus& corpus,
                                           const StopList& stoplist,
                                           const Vocabulary& vocab,
                                           std::size_t seq_len);

/// Vocabulary over the preprocessed texts of the whole corpus (labels are
/// not consulted), capped at vocab_size entries.
Vocabulary corpus_vocabulary(const LabeledCorpus& corpus,
                             const StopList& stoplist, std::size_t vocab_size);

template <class T>
struct TrainedClassifier {
  Classifier<T> classifier;
  FitResult fit;
  EvalReport validation_report;
};

/// Builds the vocabulary, initialises the model from train.seed and fits it.
template <class T>
TrainedClassifier<T> train_classifier(const LabeledCorpus& corpus,
                                      const StopList& stoplist,
                                      const ModelConfig& model_config,
                                      const TrainConfig& train_config,
                                      const EpochCallback& on_epoch = {});

template <class T>
EvalReport evaluate_classifier(const Classifier<T>& classifier,
                               const LabeledCorpus& corpus);

EvalReport report_from(const Evaluation& evaluation);

}  // namespace sentigru
