/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the sentigru bidirectional-GRU sentiment classifier.
 *
 * Objects are opaque handles released with their matching *_free call.
 * Every fallible function returns an sg_status; on failure a description is
 * available from sg_last_error() (per thread, valid until the next call on
 * that thread). Strings returned through char** out-parameters are owned by
 * the caller and released with sg_string_free().
 */
#ifndef SENTIGRU_SENTIGRU_H
#define SENTIGRU_SENTIGRU_H

#include <stddef.h>
#include <stdint.h>

#if defined(SENTIGRU_BUILDING)
#define SENTIGRU_API __attribute__((visibility("default")))
#else
#define SENTIGRU_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_INVALID_ARGUMENT = 1,
  SG_ERR_SHAPE = 2,
  SG_ERR_OUT_OF_RANGE = 3,
  SG_ERR_IO = 4,
  SG_ERR_MALFORMED_DATA = 5,
  SG_ERR_FORMAT = 6,
  SG_ERR_VERSION = 7,
  SG_ERR_CHECKSUM = 8,
  SG_ERR_INCOMPLETE_MODEL = 9,
  SG_ERR_NON_FINITE = 10,
  SG_ERR_INTERNAL = 11
} sg_status;

typedef enum sg_precision { SG_PRECISION_F32 = 0, SG_PRECISION_F64 = 1 } sg_precision;

enum { SG_NUM_LABELS = 6 };

typedef struct sg_model_config {
  uint64_t vocab_size;
  uint64_t embed_dim;
  uint64_t seq_len;
  uint64_t gru_units[3];
  double dropout_rate;
  sg_precision precision;
} sg_model_config;

typedef struct sg_train_config {
  uint64_t epochs;
  uint64_t batch_size;
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  uint64_t seed;
  double train_fraction;
  int stratify;      /* nonzero: per-label split */
  double clip_norm;  /* 0 disables global-norm clipping */
  int deterministic; /* nonzero: histories carry 0 seconds per epoch */
} sg_train_config;

typedef struct sg_epoch_record {
  uint64_t epoch;
  double train_loss;
  double train_accuracy;
  double val_loss;
  double val_accuracy;
  double seconds;
} sg_epoch_record;

typedef void (*sg_epoch_callback)(const sg_epoch_record* record, void* user);

typedef struct sg_prediction {
  int label;
  char name[16];
  double probabilities[SG_NUM_LABELS];
} sg_prediction;

typedef struct sg_corpus sg_corpus;
typedef struct sg_stoplist sg_stoplist;
typedef struct sg_model sg_model;

SENTIGRU_API const char* sg_version(void);
SENTIGRU_API const char* sg_last_error(void);
SENTIGRU_API const char* sg_status_name(sg_status status);
SENTIGRU_API void sg_string_free(char* s);

/* Defaults: the published architecture and a 5-epoch, 8:2 training run. */
SENTIGRU_API void sg_model_config_published(sg_model_config* config);
SENTIGRU_API void sg_train_config_default(sg_train_config* config);

/* header: -1 detect, 0 absent, 1 present. */
SENTIGRU_API sg_status sg_corpus_load(const char* path, char delimiter,
                                      int header, sg_corpus** out);
SENTIGRU_API size_t sg_corpus_size(const sg_corpus* corpus);
SENTIGRU_API void sg_corpus_free(sg_corpus* corpus);

SENTIGRU_API sg_status sg_stoplist_default(sg_stoplist** out);
SENTIGRU_API sg_status sg_stoplist_load(const char* path, sg_stoplist** out);
SENTIGRU_API size_t sg_stoplist_size(const sg_stoplist* stoplist);
SENTIGRU_API void sg_stoplist_free(sg_stoplist* stoplist);

/* Cleaned, space-joined tokens of one text after stopword removal. */
SENTIGRU_API sg_status sg_preprocess_text(const sg_stoplist* stoplist,
                                          const char* text, char** out);

/* Word-frequency document for one label (0..5) or all labels (-1).
 * top_k of 0 exports every token. */
SENTIGRU_API sg_status sg_wordstats_json(const sg_corpus* corpus,
                                         const sg_stoplist* stoplist,
                                         int apply_stopwords, int label,
                                         size_t top_k, char** out_json);

/* Cleaned and encoded corpus as JSON plus the vocabulary as
 * `token<TAB>id` lines. Either output may be NULL. */
SENTIGRU_API sg_status sg_preprocess_corpus(const sg_corpus* corpus,
                                            const sg_stoplist* stoplist,
                                            uint64_t vocab_size,
                                            uint64_t seq_len, char** out_json,
                                            char** out_vocab_tsv);

/* Freshly initialised model with an empty vocabulary and the shipped
 * stoplist. */
SENTIGRU_API sg_status sg_model_build(const sg_model_config* config,
                                      uint64_t seed, sg_model** out);
SENTIGRU_API sg_status sg_model_load(const char* path, sg_model** out);
SENTIGRU_API sg_status sg_model_save(const sg_model* model, const char* path);
SENTIGRU_API void sg_model_free(sg_model* model);

SENTIGRU_API sg_status sg_model_param_count(const sg_model* model,
                                            uint64_t* out);
SENTIGRU_API sg_status sg_model_summary_json(const sg_model* model,
                                             char** out_json);
/* Human-readable table, one row per layer. */
SENTIGRU_API sg_status sg_model_summary_text(const sg_model* model,
                                             char** out_text);

/* Inference-mode logits for a [batch x steps] id matrix; writes
 * batch * SG_NUM_LABELS values. */
SENTIGRU_API sg_status sg_model_logits(const sg_model* model,
                                       const uint32_t* ids, size_t batch,
                                       size_t steps, double* out_logits);

/* Builds the vocabulary, trains, and scores the held-out split. Any of the
 * JSON outputs may be NULL: history is the per-epoch array, curves the
 * per-epoch series with first-to-last deltas, eval the held-out report. */
SENTIGRU_API sg_status sg_train(const sg_corpus* corpus,
                                const sg_stoplist* stoplist,
                                const sg_model_config* model_config,
                                const sg_train_config* train_config,
                                sg_epoch_callback on_epoch, void* user,
                                sg_model** out_model, char** out_history_json,
                                char** out_curves_json, char** out_eval_json);

SENTIGRU_API sg_status sg_evaluate_json(const sg_model* model,
                                        const sg_corpus* corpus,
                                        char** out_json);

SENTIGRU_API sg_status sg_predict(const sg_model* model, const char* text,
                                  sg_prediction* out);
SENTIGRU_API sg_status sg_predict_json(const sg_model* model, const char* text,
                                       char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* SENTIGRU_SENTIGRU_H */
