#include "sdec/sdec.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "sdec/autoencoder.hpp"
#include "sdec/clustering.hpp"
#include "sdec/config.hpp"
#include "sdec/embed.hpp"
#include "sdec/io.hpp"
#include "sdec/metrics.hpp"
#include "sdec/refine.hpp"
#include "sdec/synth.hpp"

struct sdec_matrix {
  sdec::Matrix value;
};
struct sdec_sequences {
  std::vector<sdec::TokenSequence> value;
};
struct sdec_labels {
  sdec::Labels value;
};
struct sdec_config {
  sdec::RunConfig value;
};
struct sdec_autoencoder {
  sdec::AutoencoderParams params;
  std::vector<double> loss_curve;
  std::size_t degenerate_rows = 0;
};
struct sdec_cluster_model {
  sdec::ClusterModel value;
};
struct sdec_cluster_result {
  sdec::FineTuneResult value;
};

namespace {

thread_local std::string g_last_error;

sdec_status to_status(sdec::ErrorCode code) {
  using sdec::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return SDEC_ERR_INVALID_ARGUMENT;
    case ErrorCode::shape_mismatch: return SDEC_ERR_SHAPE;
    case ErrorCode::degenerate_vector:
    case ErrorCode::degenerate_row:
    case ErrorCode::empty_sequence:
    case ErrorCode::divergence_infinite: return SDEC_ERR_DEGENERATE;
    case ErrorCode::infeasible: return SDEC_ERR_INFEASIBLE;
    case ErrorCode::io: return SDEC_ERR_IO;
    case ErrorCode::bad_magic: return SDEC_ERR_BAD_MAGIC;
    case ErrorCode::truncated: return SDEC_ERR_TRUNCATED;
    case ErrorCode::unsupported_version: return SDEC_ERR_UNSUPPORTED_VERSION;
    case ErrorCode::corrupt: return SDEC_ERR_CORRUPT;
    case ErrorCode::config: return SDEC_ERR_CONFIG;
    case ErrorCode::label_range: return SDEC_ERR_LABEL_RANGE;
  }
  return SDEC_ERR_INTERNAL;
}

sdec_status fail(sdec_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
sdec_status guarded(F&& body) noexcept {
  try {
    body();
    return SDEC_OK;
  } catch (const sdec::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SDEC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SDEC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SDEC_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) {
    throw sdec::Error(sdec::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class T, class... Args>
void emit(T** out, Args&&... args) {
  require(out, "output handle");
  *out = new T{std::forward<Args>(args)...};
}

nlohmann::json config_json(const sdec::RunConfig& c) {
  return nlohmann::json::parse(sdec::config_to_json(c));
}

}  // namespace

extern "C" {

const char* sdec_version(void) { return "1.0.0"; }

const char* sdec_last_error(void) { return g_last_error.c_str(); }

const char* sdec_status_name(sdec_status status) {
  switch (status) {
    case SDEC_OK: return "ok";
    case SDEC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SDEC_ERR_SHAPE: return "shape mismatch";
    case SDEC_ERR_DEGENERATE: return "degenerate input";
    case SDEC_ERR_INFEASIBLE: return "infeasible";
    case SDEC_ERR_IO: return "i/o error";
    case SDEC_ERR_BAD_MAGIC: return "bad magic";
    case SDEC_ERR_TRUNCATED: return "truncated file";
    case SDEC_ERR_UNSUPPORTED_VERSION: return "unsupported version";
    case SDEC_ERR_CORRUPT: return "corrupt file";
    case SDEC_ERR_CONFIG: return "config error";
    case SDEC_ERR_LABEL_RANGE: return "label out of range";
    case SDEC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void sdec_string_free(char* s) { std::free(s); }

void sdec_set_threads(size_t n) { sdec::set_thread_count(n); }

sdec_status sdec_matrix_create(size_t rows, size_t cols, const double* data, sdec_matrix** out) {
  return guarded([&] {
    sdec::Matrix m(rows, cols);
    if (data) std::memcpy(m.data().data(), data, rows * cols * sizeof(double));
    emit(out, std::move(m));
  });
}

void sdec_matrix_free(sdec_matrix* m) { delete m; }
size_t sdec_matrix_rows(const sdec_matrix* m) { return m ? m->value.rows() : 0; }
size_t sdec_matrix_cols(const sdec_matrix* m) { return m ? m->value.cols() : 0; }

sdec_status sdec_matrix_copy_data(const sdec_matrix* m, double* out, size_t cap) {
  return guarded([&] {
    require(m, "matrix");
    require(out, "buffer");
    if (cap < m->value.size()) {
      throw sdec::Error(sdec::ErrorCode::invalid_argument, "buffer too small");
    }
    std::memcpy(out, m->value.data().data(), m->value.size() * sizeof(double));
  });
}

sdec_status sdec_file_kind_of(const char* path, sdec_file_kind* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output");
    const auto f = sdec::load_embeddings(path);
    *out = f.header.kind == sdec::EmbeddingKind::vectors ? SDEC_KIND_VECTORS : SDEC_KIND_SEQUENCES;
  });
}

sdec_status sdec_matrix_load(const char* path, sdec_matrix** out) {
  return guarded([&] {
    require(path, "path");
    emit(out, sdec::load_vectors(path));
  });
}

sdec_status sdec_matrix_save(const sdec_matrix* m, const char* path) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    sdec::save_embeddings(path, m->value);
  });
}

sdec_status sdec_sequences_load(const char* path, sdec_sequences** out) {
  return guarded([&] {
    require(path, "path");
    auto f = sdec::load_embeddings(path);
    if (f.header.kind != sdec::EmbeddingKind::sequences) {
      throw sdec::Error(sdec::ErrorCode::invalid_argument,
                        std::string("'") + path + "' holds vectors, expected token sequences");
    }
    emit(out, std::move(f.sequences));
  });
}

void sdec_sequences_free(sdec_sequences* s) { delete s; }
size_t sdec_sequences_count(const sdec_sequences* s) { return s ? s->value.size() : 0; }

sdec_status sdec_pool(const sdec_sequences* s, const char* strategy, sdec_matrix** out) {
  return guarded([&] {
    require(s, "sequences");
    require(strategy, "strategy");
    emit(out, sdec::pool_all(s->value, sdec::parse_pooling(strategy)));
  });
}

sdec_status sdec_normalize(const sdec_matrix* m, const char* mode, sdec_matrix** out) {
  return guarded([&] {
    require(m, "matrix");
    require(mode, "mode");
    emit(out, sdec::normalize(m->value, sdec::parse_normalization(mode)));
  });
}

sdec_status sdec_labels_create(const int32_t* data, size_t n, sdec_labels** out) {
  return guarded([&] {
    if (n > 0) require(data, "data");
    emit(out, sdec::Labels(data, data + n));
  });
}

sdec_status sdec_labels_load(const char* path, size_t k, sdec_labels** out) {
  return guarded([&] {
    require(path, "path");
    emit(out, sdec::load_labels(path, k == 0 ? std::nullopt : std::optional<std::size_t>(k)));
  });
}

sdec_status sdec_labels_save(const sdec_labels* l, const char* path) {
  return guarded([&] {
    require(l, "labels");
    require(path, "path");
    sdec::save_labels(path, l->value);
  });
}

void sdec_labels_free(sdec_labels* l) { delete l; }
size_t sdec_labels_size(const sdec_labels* l) { return l ? l->value.size() : 0; }
const int32_t* sdec_labels_data(const sdec_labels* l) { return l ? l->value.data() : nullptr; }

sdec_status sdec_config_default(sdec_config** out) {
  return guarded([&] { emit(out, sdec::RunConfig{}); });
}

sdec_status sdec_config_load(const char* path, sdec_config** out) {
  return guarded([&] {
    require(path, "path");
    emit(out, sdec::load_config(path));
  });
}

sdec_status sdec_config_parse(const char* json, sdec_config** out) {
  return guarded([&] {
    require(json, "json");
    emit(out, sdec::parse_config(json));
  });
}

void sdec_config_free(sdec_config* c) { delete c; }

sdec_status sdec_config_set(sdec_config* c, const char* key, const char* value_json) {
  return guarded([&] {
    require(c, "config");
    require(key, "key");
    require(value_json, "value");
    auto j = config_json(c->value);
    if (!j.contains(key)) {
      throw sdec::Error(sdec::ErrorCode::config, std::string("unknown config key '") + key + "'");
    }
    try {
      j[key] = nlohmann::json::parse(value_json);
    } catch (const nlohmann::json::parse_error&) {
      throw sdec::Error(sdec::ErrorCode::config,
                        std::string("value for '") + key + "' is not a JSON literal");
    }
    c->value = sdec::parse_config(j.dump());
  });
}

sdec_status sdec_config_get_number(const sdec_config* c, const char* key, double* out) {
  return guarded([&] {
    require(c, "config");
    require(key, "key");
    require(out, "output");
    const auto j = config_json(c->value);
    if (!j.contains(key)) {
      throw sdec::Error(sdec::ErrorCode::config, std::string("unknown config key '") + key + "'");
    }
    const auto& v = j[key];
    if (v.is_boolean()) {
      *out = v.get<bool>() ? 1.0 : 0.0;
    } else if (v.is_number()) {
      *out = v.get<double>();
    } else {
      throw sdec::Error(sdec::ErrorCode::config, std::string("config key '") + key + "' is not numeric");
    }
  });
}

sdec_status sdec_config_get_string(const sdec_config* c, const char* key, char** out) {
  return guarded([&] {
    require(c, "config");
    require(key, "key");
    require(out, "output");
    const auto j = config_json(c->value);
    if (!j.contains(key)) {
      throw sdec::Error(sdec::ErrorCode::config, std::string("unknown config key '") + key + "'");
    }
    const auto& v = j[key];
    *out = dup_string(v.is_string() ? v.get<std::string>() : v.dump());
  });
}

sdec_status sdec_config_to_json(const sdec_config* c, char** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "output");
    *out = dup_string(sdec::config_to_json(c->value));
  });
}

uint64_t sdec_config_hash(const sdec_config* c) { return c ? sdec::config_hash(c->value) : 0; }

sdec_status sdec_pretrain(const sdec_matrix* data, const sdec_config* c, sdec_autoencoder** out) {
  return guarded([&] {
    require(data, "data");
    require(c, "config");
    auto r = sdec::pretrain(data->value, c->value.autoencoder(data->value.cols()));
    emit(out, std::move(r.params), std::move(r.loss_curve), r.degenerate_rows);
  });
}

void sdec_autoencoder_free(sdec_autoencoder* ae) { delete ae; }
size_t sdec_autoencoder_input_dim(const sdec_autoencoder* ae) { return ae ? ae->params.input_dim() : 0; }
size_t sdec_autoencoder_latent_dim(const sdec_autoencoder* ae) { return ae ? ae->params.latent_dim() : 0; }
size_t sdec_autoencoder_degenerate_rows(const sdec_autoencoder* ae) { return ae ? ae->degenerate_rows : 0; }

sdec_status sdec_autoencoder_loss_curve(const sdec_autoencoder* ae, double* out, size_t cap,
                                        size_t* len) {
  return guarded([&] {
    require(ae, "autoencoder");
    if (len) *len = ae->loss_curve.size();
    if (out) {
      const std::size_t n = std::min(cap, ae->loss_curve.size());
      std::copy_n(ae->loss_curve.begin(), n, out);
    }
  });
}

sdec_status sdec_autoencoder_encode(const sdec_autoencoder* ae, const sdec_matrix* data,
                                    sdec_matrix** out) {
  return guarded([&] {
    require(ae, "autoencoder");
    require(data, "data");
    emit(out, sdec::encode(ae->params, data->value));
  });
}

sdec_status sdec_checkpoint_save(const char* path, const sdec_autoencoder* ae,
                                 const sdec_cluster_model* model, const sdec_config* config) {
  return guarded([&] {
    require(path, "path");
    require(ae, "autoencoder");
    sdec::save_checkpoint(path, ae->params, model ? &model->value : nullptr,
                          config ? sdec::config_hash(config->value) : 0);
  });
}

sdec_status sdec_checkpoint_load(const char* path, const sdec_config* config,
                                 sdec_autoencoder** ae_out, sdec_cluster_model** model_out,
                                 int* hash_mismatch) {
  return guarded([&] {
    require(path, "path");
    require(ae_out, "autoencoder output");
    auto loaded = sdec::load_checkpoint(
        path, config ? std::optional<std::uint64_t>(sdec::config_hash(config->value)) : std::nullopt);
    auto* ae = new sdec_autoencoder{std::move(loaded.checkpoint.params), {}, 0};
    if (model_out) {
      *model_out = loaded.checkpoint.model ? new sdec_cluster_model{std::move(*loaded.checkpoint.model)}
                                           : nullptr;
    }
    *ae_out = ae;
    if (hash_mismatch) *hash_mismatch = loaded.hash_mismatch ? 1 : 0;
  });
}

sdec_status sdec_cluster(const sdec_matrix* data, const sdec_autoencoder* ae, size_t k,
                         const sdec_config* c, sdec_cluster_result** out) {
  return guarded([&] {
    require(data, "data");
    require(ae, "autoencoder");
    require(c, "config");
    auto aec = c->value.autoencoder(data->value.cols());
    emit(out, sdec::joint_finetune(ae->params, data->value, k, c->value.finetune(), aec));
  });
}

void sdec_cluster_result_free(sdec_cluster_result* r) { delete r; }

sdec_status sdec_cluster_result_labels(const sdec_cluster_result* r, sdec_labels** out) {
  return guarded([&] {
    require(r, "result");
    emit(out, r->value.state.labels);
  });
}

sdec_status sdec_cluster_result_initial_labels(const sdec_cluster_result* r, sdec_labels** out) {
  return guarded([&] {
    require(r, "result");
    emit(out, r->value.initial_labels);
  });
}

sdec_status sdec_cluster_result_autoencoder(const sdec_cluster_result* r, sdec_autoencoder** out) {
  return guarded([&] {
    require(r, "result");
    emit(out, r->value.params, std::vector<double>{}, std::size_t{0});
  });
}

sdec_status sdec_cluster_result_model(const sdec_cluster_result* r, sdec_cluster_model** out) {
  return guarded([&] {
    require(r, "result");
    emit(out, r->value.model);
  });
}

sdec_status sdec_cluster_result_save_history(const sdec_cluster_result* r, const char* path) {
  return guarded([&] {
    require(r, "result");
    require(path, "path");
    sdec::save_history(path, r->value.history);
  });
}

size_t sdec_cluster_result_history_length(const sdec_cluster_result* r) {
  return r ? r->value.history.size() : 0;
}

sdec_stop_reason sdec_cluster_result_stop_reason(const sdec_cluster_result* r) {
  if (!r) return SDEC_STOP_MAX_ITERATIONS;
  switch (r->value.stop_reason) {
    case sdec::StopReason::delta_label: return SDEC_STOP_DELTA_LABEL;
    case sdec::StopReason::kl_change: return SDEC_STOP_KL_CHANGE;
    case sdec::StopReason::max_iterations: return SDEC_STOP_MAX_ITERATIONS;
  }
  return SDEC_STOP_MAX_ITERATIONS;
}

void sdec_cluster_model_free(sdec_cluster_model* m) { delete m; }
size_t sdec_cluster_model_k(const sdec_cluster_model* m) { return m ? m->value.k() : 0; }

sdec_status sdec_assign(const sdec_autoencoder* ae, const sdec_cluster_model* m,
                        const sdec_matrix* data, sdec_labels** out) {
  return guarded([&] {
    require(ae, "autoencoder");
    require(m, "cluster model");
    require(data, "data");
    emit(out, sdec::hard_labels(sdec::soft_assign(sdec::encode(ae->params, data->value), m->value)));
  });
}

sdec_status sdec_refine(const sdec_matrix* data, const sdec_labels* labels, size_t k,
                        double lambda, size_t max_passes, const char* log_path,
                        sdec_labels** out, sdec_refine_stats* stats) {
  return guarded([&] {
    require(data, "data");
    require(labels, "labels");
    require(out, "output");
    if (k == 0) {
      for (const auto l : labels->value) k = std::max<std::size_t>(k, static_cast<std::size_t>(std::max(l, 0)) + 1);
    }
    auto r = sdec::refine(data->value, labels->value, k, sdec::RefineConfig{lambda, max_passes});
    if (log_path) sdec::save_refine_log(log_path, r.log);
    if (stats) {
      stats->passes = r.passes;
      stats->reassigned = r.reassigned;
      stats->degenerate_pairs = r.degenerate_pairs;
      stats->emptied_cluster = r.emptied_cluster ? 1 : 0;
    }
    emit(out, std::move(r.labels));
  });
}

sdec_status sdec_evaluate(const sdec_labels* y_true, const sdec_labels* y_pred, sdec_metrics* out,
                          char** json_out) {
  return guarded([&] {
    require(y_true, "true labels");
    require(y_pred, "predicted labels");
    const auto report = sdec::evaluate(y_true->value, y_pred->value);
    if (out) *out = sdec_metrics{report.acc, report.nmi, report.ari};
    if (json_out) *json_out = dup_string(sdec::metrics_to_json(report));
  });
}

sdec_status sdec_synth_blobs(size_t blobs, size_t n, size_t dim, double separation, uint64_t seed,
                             sdec_matrix** points, sdec_labels** labels) {
  return guarded([&] {
    require(points, "points output");
    require(labels, "labels output");
    auto data = sdec::make_blobs(blobs, n, dim, separation, seed);
    auto* p = new sdec_matrix{std::move(data.points)};
    try {
      *labels = new sdec_labels{std::move(data.labels)};
    } catch (...) {
      delete p;
      throw;
    }
    *points = p;
  });
}

}  // extern "C"
