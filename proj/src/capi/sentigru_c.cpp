// SPDX-License-Identifier: Apache-2.0
#include "sentigru/sentigru.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <new>
#include <sstream>
#include <string>
#include <variant>

#include "core/pipeline.hpp"
#include "core/serialize.hpp"
#include "core/wordstats.hpp"

using namespace sentigru;

struct sg_corpus {
  LabeledCorpus corpus;
};

struct sg_stoplist {
  StopList stoplist;
};

struct sg_model {
  AnyClassifier classifier;
};

namespace {

thread_local std::string g_last_error;

sg_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return SG_ERR_INVALID_ARGUMENT;
    case ErrorCode::kShapeMismatch: return SG_ERR_SHAPE;
    case ErrorCode::kOutOfRange: return SG_ERR_OUT_OF_RANGE;
    case ErrorCode::kIo: return SG_ERR_IO;
    case ErrorCode::kMalformedData: return SG_ERR_MALFORMED_DATA;
    case ErrorCode::kFormat: return SG_ERR_FORMAT;
    case ErrorCode::kVersionMismatch: return SG_ERR_VERSION;
    case ErrorCode::kChecksum: return SG_ERR_CHECKSUM;
    case ErrorCode::kIncompleteModel: return SG_ERR_INCOMPLETE_MODEL;
    case ErrorCode::kNonFinite: return SG_ERR_NON_FINITE;
  }
  return SG_ERR_INTERNAL;
}

sg_status fail(sg_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
sg_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SG_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SG_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

ModelConfig to_model_config(const sg_model_config& c) {
  ModelConfig config;
  config.vocab_size = c.vocab_size;
  config.embed_dim = c.embed_dim;
  config.seq_len = c.seq_len;
  for (int i = 0; i < 3; ++i) config.gru_units[i] = c.gru_units[i];
  config.dropout_rate = c.dropout_rate;
  config.validate();
  if (c.precision != SG_PRECISION_F32 && c.precision != SG_PRECISION_F64) {
    throw Error(ErrorCode::kInvalidArgument, "unknown precision");
  }
  return config;
}

TrainConfig to_train_config(const sg_train_config& c) {
  TrainConfig config;
  config.epochs = c.epochs;
  config.batch_size = c.batch_size;
  config.adam.learning_rate = c.learning_rate;
  config.adam.beta1 = c.beta1;
  config.adam.beta2 = c.beta2;
  config.adam.epsilon = c.epsilon;
  config.seed = c.seed;
  config.train_fraction = c.train_fraction;
  config.stratify = c.stratify != 0;
  config.clip_norm = c.clip_norm;
  config.record_wall_time = c.deterministic == 0;
  config.validate();
  return config;
}

nlohmann::json summary_json(const std::vector<SummaryRow>& rows,
                            std::size_t total) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& row : rows) {
    layers.push_back({{"name", row.name},
                      {"type", row.type},
                      {"output_shape", row.output_shape},
                      {"output_shape_text", row.shape_text()},
                      {"params", row.params}});
  }
  return {{"layers", std::move(layers)}, {"total_params", total}};
}

std::string summary_text(const std::vector<SummaryRow>& rows,
                         std::size_t total) {
  std::ostringstream out;
  const std::string rule(76, '-');
  out << std::left << std::setw(44) << "Layer (type)" << std::setw(20)
      << "Output Shape" << std::right << std::setw(12) << "Param #" << '\n'
      << rule << '\n';
  for (const auto& row : rows) {
    out << std::left << std::setw(44) << (row.name + " (" + row.type + ")")
        << std::setw(20) << row.shape_text() << std::right << std::setw(12)
        << row.params << '\n';
  }
  out << rule << '\n' << "Total params: " << total << '\n';
  return out.str();
}

}  // namespace

extern "C" {

const char* sg_version(void) { return "1.0.0"; }

const char* sg_last_error(void) { return g_last_error.c_str(); }

const char* sg_status_name(sg_status status) {
  switch (status) {
    case SG_OK: return "ok";
    case SG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SG_ERR_SHAPE: return "shape mismatch";
    case SG_ERR_OUT_OF_RANGE: return "out of range";
    case SG_ERR_IO: return "i/o error";
    case SG_ERR_MALFORMED_DATA: return "malformed data";
    case SG_ERR_FORMAT: return "bad model format";
    case SG_ERR_VERSION: return "model version mismatch";
    case SG_ERR_CHECKSUM: return "checksum mismatch";
    case SG_ERR_INCOMPLETE_MODEL: return "incomplete model";
    case SG_ERR_NON_FINITE: return "non-finite value";
    case SG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void sg_string_free(char* s) { std::free(s); }

void sg_model_config_published(sg_model_config* config) {
  if (!config) return;
  const ModelConfig published = ModelConfig::published();
  config->vocab_size = published.vocab_size;
  config->embed_dim = published.embed_dim;
  config->seq_len = published.seq_len;
  for (int i = 0; i < 3; ++i) config->gru_units[i] = published.gru_units[i];
  config->dropout_rate = published.dropout_rate;
  config->precision = SG_PRECISION_F32;
}

void sg_train_config_default(sg_train_config* config) {
  if (!config) return;
  const TrainConfig d;
  config->epochs = d.epochs;
  config->batch_size = d.batch_size;
  config->learning_rate = d.adam.learning_rate;
  config->beta1 = d.adam.beta1;
  config->beta2 = d.adam.beta2;
  config->epsilon = d.adam.epsilon;
  config->seed = d.seed;
  config->train_fraction = d.train_fraction;
  config->stratify = d.stratify ? 1 : 0;
  config->clip_norm = d.clip_norm;
  config->deterministic = d.record_wall_time ? 0 : 1;
}

sg_status sg_corpus_load(const char* path, char delimiter, int header,
                         sg_corpus** out) {
  return guarded([&] {
    require(path && out, "path and out must be non-null");
    DatasetFormat format;
    format.delimiter = delimiter;
    format.header = header < 0    ? HeaderMode::kAuto
                    : header == 0 ? HeaderMode::kAbsent
                                  : HeaderMode::kPresent;
    *out = new sg_corpus{load_dataset(path, format)};
  });
}

size_t sg_corpus_size(const sg_corpus* corpus) {
  return corpus ? corpus->corpus.size() : 0;
}

void sg_corpus_free(sg_corpus* corpus) { delete corpus; }

sg_status sg_stoplist_default(sg_stoplist** out) {
  return guarded([&] {
    require(out, "out must be non-null");
    *out = new sg_stoplist{StopList::english()};
  });
}

sg_status sg_stoplist_load(const char* path, sg_stoplist** out) {
  return guarded([&] {
    require(path && out, "path and out must be non-null");
    *out = new sg_stoplist{StopList::load(path)};
  });
}

size_t sg_stoplist_size(const sg_stoplist* stoplist) {
  return stoplist ? stoplist->stoplist.size() : 0;
}

void sg_stoplist_free(sg_stoplist* stoplist) { delete stoplist; }

sg_status sg_preprocess_text(const sg_stoplist* stoplist, const char* text,
                             char** out) {
  return guarded([&] {
    require(stoplist && text && out, "arguments must be non-null");
    std::string joined;
    for (const auto& token : preprocess(text, stoplist->stoplist)) {
      if (!joined.empty()) joined += ' ';
      joined += token;
    }
    *out = dup_string(joined);
  });
}

sg_status sg_wordstats_json(const sg_corpus* corpus,
                            const sg_stoplist* stoplist, int apply_stopwords,
                            int label, size_t top_k, char** out_json) {
  return guarded([&] {
    require(corpus && stoplist && out_json, "arguments must be non-null");
    if (label < -1 || label >= kNumLabels) {
      throw Error(ErrorCode::kOutOfRange, "label must be -1 or 0..5");
    }
    const auto tables = frequency_by_label(
        corpus->corpus, stoplist->stoplist,
        apply_stopwords ? StopwordMode::kApply : StopwordMode::kSkip);
    const FrequencyTable& table =
        label < 0 ? tables.combined
                  : tables.per_label[static_cast<std::size_t>(label)];
    *out_json = dup_string(to_json(table, top_k).dump(2) + "\n");
  });
}

sg_status sg_preprocess_corpus(const sg_corpus* corpus,
                               const sg_stoplist* stoplist,
                               uint64_t vocab_size, uint64_t seq_len,
                               char** out_json, char** out_vocab_tsv) {
  return guarded([&] {
    require(corpus && stoplist, "arguments must be non-null");
    const Vocabulary vocab =
        corpus_vocabulary(corpus->corpus, stoplist->stoplist, vocab_size);
    nlohmann::json records = nlohmann::json::array();
    for (const auto& record : corpus->corpus.records) {
      const auto tokens = preprocess(record.text, stoplist->stoplist);
      records.push_back({{"label", record.label},
                         {"tokens", tokens},
                         {"ids", encode(tokens, vocab, seq_len)}});
    }
    const nlohmann::json doc = {{"vocab_size", vocab.size()},
                                {"seq_len", seq_len},
                                {"records", std::move(records)}};
    emit(out_json, doc.dump() + "\n");
    emit(out_vocab_tsv, vocab.to_tsv());
  });
}

sg_status sg_model_build(const sg_model_config* config, uint64_t seed,
                         sg_model** out) {
  return guarded([&] {
    require(config && out, "config and out must be non-null");
    const ModelConfig mc = to_model_config(*config);
    Vocabulary vocab(mc.vocab_size);
    if (config->precision == SG_PRECISION_F64) {
      *out = new sg_model{
          Classifier<double>{Model<double>(mc, seed), vocab, StopList::english()}};
    } else {
      *out = new sg_model{
          Classifier<float>{Model<float>(mc, seed), vocab, StopList::english()}};
    }
  });
}

sg_status sg_model_load(const char* path, sg_model** out) {
  return guarded([&] {
    require(path && out, "path and out must be non-null");
    *out = new sg_model{load(path)};
  });
}

sg_status sg_model_save(const sg_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "model and path must be non-null");
    std::visit([&](const auto& c) { save(c, path); }, model->classifier);
  });
}

void sg_model_free(sg_model* model) { delete model; }

sg_status sg_model_param_count(const sg_model* model, uint64_t* out) {
  return guarded([&] {
    require(model && out, "model and out must be non-null");
    *out = std::visit([](const auto& c) { return c.model.param_count(); },
                      model->classifier);
  });
}

sg_status sg_model_summary_json(const sg_model* model, char** out_json) {
  return guarded([&] {
    require(model && out_json, "model and out must be non-null");
    std::visit(
        [&](const auto& c) {
          *out_json = dup_string(
              summary_json(c.model.summary(), c.model.param_count()).dump(2) +
              "\n");
        },
        model->classifier);
  });
}

sg_status sg_model_summary_text(const sg_model* model, char** out_text) {
  return guarded([&] {
    require(model && out_text, "model and out must be non-null");
    std::visit(
        [&](const auto& c) {
          *out_text =
              dup_string(summary_text(c.model.summary(), c.model.param_count()));
        },
        model->classifier);
  });
}

sg_status sg_model_logits(const sg_model* model, const uint32_t* ids,
                          size_t batch, size_t steps, double* out_logits) {
  return guarded([&] {
    require(model && ids && out_logits && batch > 0,
            "model, ids and out must be non-null and batch > 0");
    IdBatch input{batch, steps, std::vector<std::uint32_t>(ids, ids + batch * steps)};
    std::visit(
        [&](const auto& c) {
          const auto logits = c.model.infer(input);
          for (std::size_t i = 0; i < logits.size(); ++i) {
            out_logits[i] = static_cast<double>(logits[i]);
          }
        },
        model->classifier);
  });
}

sg_status sg_train(const sg_corpus* corpus, const sg_stoplist* stoplist,
                   const sg_model_config* model_config,
                   const sg_train_config* train_config,
                   sg_epoch_callback on_epoch, void* user, sg_model** out_model,
                   char** out_history_json, char** out_curves_json,
                   char** out_eval_json) {
  return guarded([&] {
    require(corpus && stoplist && model_config && train_config,
            "corpus, stoplist and configs must be non-null");
    const ModelConfig mc = to_model_config(*model_config);
    const TrainConfig tc = to_train_config(*train_config);
    EpochCallback callback;
    if (on_epoch) {
      callback = [on_epoch, user](const EpochRecord& r) {
        const sg_epoch_record record{r.epoch,        r.train_loss,
                                     r.train_accuracy, r.val_loss,
                                     r.val_accuracy,   r.seconds};
        on_epoch(&record, user);
      };
    }
    auto finish = [&](auto trained) {
      emit(out_history_json, history_json(trained.fit.history).dump(2) + "\n");
      emit(out_curves_json,
           history_report_json(trained.fit.history).dump(2) + "\n");
      emit(out_eval_json,
           to_json(trained.validation_report, kLabelNames).dump(2) + "\n");
      if (out_model) *out_model = new sg_model{std::move(trained.classifier)};
    };
    if (model_config->precision == SG_PRECISION_F64) {
      finish(train_classifier<double>(corpus->corpus, stoplist->stoplist, mc,
                                      tc, callback));
    } else {
      finish(train_classifier<float>(corpus->corpus, stoplist->stoplist, mc, tc,
                                     callback));
    }
  });
}

sg_status sg_evaluate_json(const sg_model* model, const sg_corpus* corpus,
                           char** out_json) {
  return guarded([&] {
    require(model && corpus && out_json, "arguments must be non-null");
    const EvalReport report = std::visit(
        [&](const auto& c) { return evaluate_classifier(c, corpus->corpus); },
        model->classifier);
    *out_json = dup_string(to_json(report, kLabelNames).dump(2) + "\n");
  });
}

sg_status sg_predict(const sg_model* model, const char* text,
                     sg_prediction* out) {
  return guarded([&] {
    require(model && text && out, "arguments must be non-null");
    const Prediction p = std::visit(
        [&](const auto& c) { return predict(c, text); }, model->classifier);
    out->label = p.label;
    std::snprintf(out->name, sizeof(out->name), "%s", p.name.c_str());
    for (int k = 0; k < SG_NUM_LABELS; ++k) {
      out->probabilities[k] = p.probabilities[static_cast<std::size_t>(k)];
    }
  });
}

sg_status sg_predict_json(const sg_model* model, const char* text,
                          char** out_json) {
  return guarded([&] {
    require(model && text && out_json, "arguments must be non-null");
    const Prediction p = std::visit(
        [&](const auto& c) { return predict(c, text); }, model->classifier);
    nlohmann::json probs = nlohmann::json::object();
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      probs[std::string(kLabelNames[k])] = p.probabilities[k];
    }
    const nlohmann::json doc = {{"label", p.label},
                                {"name", p.name},
                                {"probabilities", p.probabilities},
                                {"by_name", std::move(probs)}};
    *out_json = dup_string(doc.dump(2) + "\n");
  });
}

}  // extern "C"
