/*
 * C interface to the SDEC clustering engine.
 *
 * Every object is an opaque handle created by a sdec_*_create / _load /
 * producing call and released with the matching sdec_*_free. Functions return
 * an sdec_status; on failure sdec_last_error() describes the problem for the
 * calling thread until its next failing call. Output handles are only written
 * on success. Strings returned through char** are released with
 * sdec_string_free.
 */
#ifndef SDEC_SDEC_H
#define SDEC_SDEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SDEC_BUILDING_LIBRARY)
#    define SDEC_API __declspec(dllexport)
#  else
#    define SDEC_API __declspec(dllimport)
#  endif
#else
#  define SDEC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdec_status {
  SDEC_OK = 0,
  SDEC_ERR_INVALID_ARGUMENT = 1,
  SDEC_ERR_SHAPE = 2,
  SDEC_ERR_DEGENERATE = 3,
  SDEC_ERR_INFEASIBLE = 4,
  SDEC_ERR_IO = 5,
  SDEC_ERR_BAD_MAGIC = 6,
  SDEC_ERR_TRUNCATED = 7,
  SDEC_ERR_UNSUPPORTED_VERSION = 8,
  SDEC_ERR_CORRUPT = 9,
  SDEC_ERR_CONFIG = 10,
  SDEC_ERR_LABEL_RANGE = 11,
  SDEC_ERR_INTERNAL = 12
} sdec_status;

typedef enum sdec_file_kind {
  SDEC_KIND_VECTORS = 0,
  SDEC_KIND_SEQUENCES = 1
} sdec_file_kind;

typedef enum sdec_stop_reason {
  SDEC_STOP_DELTA_LABEL = 0,
  SDEC_STOP_KL_CHANGE = 1,
  SDEC_STOP_MAX_ITERATIONS = 2
} sdec_stop_reason;

typedef struct sdec_matrix sdec_matrix;
typedef struct sdec_sequences sdec_sequences;
typedef struct sdec_labels sdec_labels;
typedef struct sdec_config sdec_config;
typedef struct sdec_autoencoder sdec_autoencoder;
typedef struct sdec_cluster_model sdec_cluster_model;
typedef struct sdec_cluster_result sdec_cluster_result;

typedef struct sdec_metrics {
  double acc;
  double nmi;
  double ari;
} sdec_metrics;

typedef struct sdec_refine_stats {
  size_t passes;
  size_t reassigned;
  size_t degenerate_pairs;
  int emptied_cluster;
} sdec_refine_stats;

SDEC_API const char* sdec_version(void);
SDEC_API const char* sdec_last_error(void);
SDEC_API const char* sdec_status_name(sdec_status status);
SDEC_API void sdec_string_free(char* s);
/* 0 selects hardware concurrency. */
SDEC_API void sdec_set_threads(size_t n);

/* Dense matrices. data may be NULL for a zero matrix. */
SDEC_API sdec_status sdec_matrix_create(size_t rows, size_t cols, const double* data,
                                        sdec_matrix** out);
SDEC_API void sdec_matrix_free(sdec_matrix* m);
SDEC_API size_t sdec_matrix_rows(const sdec_matrix* m);
SDEC_API size_t sdec_matrix_cols(const sdec_matrix* m);
/* Copies rows*cols row-major values; cap is the buffer length in doubles. */
SDEC_API sdec_status sdec_matrix_copy_data(const sdec_matrix* m, double* out, size_t cap);

/* Embedding files. */
SDEC_API sdec_status sdec_file_kind_of(const char* path, sdec_file_kind* out);
SDEC_API sdec_status sdec_matrix_load(const char* path, sdec_matrix** out);
SDEC_API sdec_status sdec_matrix_save(const sdec_matrix* m, const char* path);
SDEC_API sdec_status sdec_sequences_load(const char* path, sdec_sequences** out);
SDEC_API void sdec_sequences_free(sdec_sequences* s);
SDEC_API size_t sdec_sequences_count(const sdec_sequences* s);

/* strategy: "cls" | "last" | "mean" | "max". */
SDEC_API sdec_status sdec_pool(const sdec_sequences* s, const char* strategy, sdec_matrix** out);
/* mode: "unit_norm" | "layer_norm" | "feature_standardize" | "none";
   feature_standardize fits on the input itself. */
SDEC_API sdec_status sdec_normalize(const sdec_matrix* m, const char* mode, sdec_matrix** out);

/* Label vectors. k == 0 disables the range check on load. */
SDEC_API sdec_status sdec_labels_create(const int32_t* data, size_t n, sdec_labels** out);
SDEC_API sdec_status sdec_labels_load(const char* path, size_t k, sdec_labels** out);
SDEC_API sdec_status sdec_labels_save(const sdec_labels* l, const char* path);
SDEC_API void sdec_labels_free(sdec_labels* l);
SDEC_API size_t sdec_labels_size(const sdec_labels* l);
SDEC_API const int32_t* sdec_labels_data(const sdec_labels* l);

/* Run configuration (JSON, strict keys). */
SDEC_API sdec_status sdec_config_default(sdec_config** out);
SDEC_API sdec_status sdec_config_load(const char* path, sdec_config** out);
SDEC_API sdec_status sdec_config_parse(const char* json, sdec_config** out);
SDEC_API void sdec_config_free(sdec_config* c);
/* Overrides one key; value_json is a JSON literal such as "0.1" or "\"mean\"". */
SDEC_API sdec_status sdec_config_set(sdec_config* c, const char* key, const char* value_json);
SDEC_API sdec_status sdec_config_get_number(const sdec_config* c, const char* key, double* out);
SDEC_API sdec_status sdec_config_get_string(const sdec_config* c, const char* key, char** out);
SDEC_API sdec_status sdec_config_to_json(const sdec_config* c, char** out);
SDEC_API uint64_t sdec_config_hash(const sdec_config* c);

/* Autoencoder pretraining. */
SDEC_API sdec_status sdec_pretrain(const sdec_matrix* data, const sdec_config* c,
                                   sdec_autoencoder** out);
SDEC_API void sdec_autoencoder_free(sdec_autoencoder* ae);
SDEC_API size_t sdec_autoencoder_input_dim(const sdec_autoencoder* ae);
SDEC_API size_t sdec_autoencoder_latent_dim(const sdec_autoencoder* ae);
/* Per-epoch mean reconstruction loss; *len receives the full length. */
SDEC_API sdec_status sdec_autoencoder_loss_curve(const sdec_autoencoder* ae, double* out,
                                                 size_t cap, size_t* len);
SDEC_API size_t sdec_autoencoder_degenerate_rows(const sdec_autoencoder* ae);
SDEC_API sdec_status sdec_autoencoder_encode(const sdec_autoencoder* ae, const sdec_matrix* data,
                                             sdec_matrix** out);

/* Checkpoints. model and config may be NULL. On load, *model_out is set to
   NULL when the file has no cluster model; *hash_mismatch is nonzero when
   config is given and its hash differs from the stored one. */
SDEC_API sdec_status sdec_checkpoint_save(const char* path, const sdec_autoencoder* ae,
                                          const sdec_cluster_model* model,
                                          const sdec_config* config);
SDEC_API sdec_status sdec_checkpoint_load(const char* path, const sdec_config* config,
                                          sdec_autoencoder** ae_out,
                                          sdec_cluster_model** model_out, int* hash_mismatch);

/* Joint fine-tuning from a pretrained autoencoder (left untouched). */
SDEC_API sdec_status sdec_cluster(const sdec_matrix* data, const sdec_autoencoder* ae, size_t k,
                                  const sdec_config* c, sdec_cluster_result** out);
SDEC_API void sdec_cluster_result_free(sdec_cluster_result* r);
SDEC_API sdec_status sdec_cluster_result_labels(const sdec_cluster_result* r, sdec_labels** out);
SDEC_API sdec_status sdec_cluster_result_initial_labels(const sdec_cluster_result* r,
                                                        sdec_labels** out);
SDEC_API sdec_status sdec_cluster_result_autoencoder(const sdec_cluster_result* r,
                                                     sdec_autoencoder** out);
SDEC_API sdec_status sdec_cluster_result_model(const sdec_cluster_result* r,
                                               sdec_cluster_model** out);
SDEC_API sdec_status sdec_cluster_result_save_history(const sdec_cluster_result* r,
                                                      const char* path);
SDEC_API size_t sdec_cluster_result_history_length(const sdec_cluster_result* r);
SDEC_API sdec_stop_reason sdec_cluster_result_stop_reason(const sdec_cluster_result* r);

SDEC_API void sdec_cluster_model_free(sdec_cluster_model* m);
SDEC_API size_t sdec_cluster_model_k(const sdec_cluster_model* m);
/* Hard labels of data under an encoder and centroids. */
SDEC_API sdec_status sdec_assign(const sdec_autoencoder* ae, const sdec_cluster_model* m,
                                 const sdec_matrix* data, sdec_labels** out);

/* Semantic refinement. k == 0 uses max(label) + 1. log_path may be NULL;
   stats may be NULL. */
SDEC_API sdec_status sdec_refine(const sdec_matrix* data, const sdec_labels* labels, size_t k,
                                 double lambda, size_t max_passes, const char* log_path,
                                 sdec_labels** out, sdec_refine_stats* stats);

/* ACC / NMI / ARI. json_out (nullable) receives the report as JSON. */
SDEC_API sdec_status sdec_evaluate(const sdec_labels* y_true, const sdec_labels* y_pred,
                                   sdec_metrics* out, char** json_out);

/* Gaussian blobs, pairwise centre distance = separation (unit variance). */
SDEC_API sdec_status sdec_synth_blobs(size_t blobs, size_t n, size_t dim, double separation,
                                      uint64_t seed, sdec_matrix** points,
                                      sdec_labels** labels);

#ifdef __cplusplus
}
#endif

#endif /* SDEC_SDEC_H */
