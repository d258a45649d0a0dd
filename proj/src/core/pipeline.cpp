// SPDX-License-Identifier: Apache-2.0
#include "core/pipeline.hpp"

namespace sentigru {

std::vector<EncodedSequence> encode_corpus(const LabeledCorpus& corpus,
                                           const StopList& stoplist,
                                           const Vocabulary& vocab,
                                           std::size_t seq_len) {
  std::vector<EncodedSequence> out;
  out.reserve(corpus.size());
  for (const auto& record : corpus.records) {
    out.push_back(
        {encode(preprocess(record.text, stoplist), vocab, seq_len), record.label});
  }
  return out;
}

Vocabulary corpus_vocabulary(const LabeledCorpus& corpus,
                             const StopList& stoplist, std::size_t vocab_size) {
  std::vector<std::vector<std::string>> documents;
  documents.reserve(corpus.size());
  for (const auto& record : corpus.records) {
    documents.push_back(preprocess(record.text, stoplist));
  }
  return build_vocabulary(documents, vocab_size);
}

EvalReport report_from(const Evaluation& evaluation) {
  return classification_metrics(
      confusion_matrix(evaluation.truth, evaluation.predicted, kNumLabels));
}

template <class T>
TrainedClassifier<T> train_classifier(const LabeledCorpus& corpus,
                                      const StopList& stoplist,
                                      const ModelConfig& model_config,
                                      const TrainConfig& train_config,
                                      const EpochCallback& on_epoch) {
  model_config.validate();
  train_config.validate();
  Vocabulary vocab =
      corpus_vocabulary(corpus, stoplist, model_config.vocab_size);
  const auto encoded =
      encode_corpus(corpus, stoplist, vocab, model_config.seq_len);
  Model<T> model(model_config, train_config.seed);
  FitResult result = fit(model, encoded, train_config, on_epoch);
  EvalReport report = report_from(evaluate(model, result.validation));
  return {Classifier<T>{std::move(model), std::move(vocab), stoplist},
          std::move(result), std::move(report)};
}

template <class T>
EvalReport evaluate_classifier(const Classifier<T>& classifier,
                               const LabeledCorpus& corpus) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation corpus is empty");
  }
  const auto encoded = encode_corpus(corpus, classifier.stoplist,
                                     classifier.vocab,
                                     classifier.model.config().seq_len);
  return report_from(evaluate(classifier.model, encoded));
}

template TrainedClassifier<float> train_classifier<float>(
    const LabeledCorpus&, const StopList&, const ModelConfig&,
    const TrainConfig&, const EpochCallback&);
template TrainedClassifier<double> train_classifier<double>(
    const LabeledCorpus&, const StopList&, const ModelConfig&,
    const TrainConfig&, const EpochCallback&);
template EvalReport evaluate_classifier<float>(const Classifier<float>&,
                                               const LabeledCorpus&);
template EvalReport evaluate_classifier<double>(const Classifier<double>&,
                                                const LabeledCorpus&);

}  // namespace sentigru
