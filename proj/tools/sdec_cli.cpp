// Command-line front end. Links only the C interface.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdec/sdec.h"

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitMissingFile = 3,
  kExitInfeasible = 4,
  kExitBadFile = 5,
  kExitConfig = 6,
  kExitLabelRange = 7,
};

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  runtime failure\n"
    "  2  usage error (bad flag, k < 1)\n"
    "  3  missing or unreadable file\n"
    "  4  infeasible request (k greater than the number of points)\n"
    "  5  malformed input file (bad magic, truncated, unsupported version)\n"
    "  6  invalid config\n"
    "  7  label out of range\n"
    "Environment: SDEC_THREADS caps worker threads (0 = all cores).";

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(sdec_status s) {
  switch (s) {
    case SDEC_OK: return kExitOk;
    case SDEC_ERR_IO: return kExitMissingFile;
    case SDEC_ERR_INFEASIBLE: return kExitInfeasible;
    case SDEC_ERR_BAD_MAGIC:
    case SDEC_ERR_TRUNCATED:
    case SDEC_ERR_UNSUPPORTED_VERSION:
    case SDEC_ERR_CORRUPT: return kExitBadFile;
    case SDEC_ERR_CONFIG: return kExitConfig;
    case SDEC_ERR_LABEL_RANGE: return kExitLabelRange;
    default: return kExitFailure;
  }
}

void check(sdec_status s, const std::string& context) {
  if (s != SDEC_OK) {
    throw CliError{exit_code_for(s), context + ": " + sdec_status_name(s) + ": " + sdec_last_error()};
  }
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using MatrixPtr = std::unique_ptr<sdec_matrix, Deleter<sdec_matrix, sdec_matrix_free>>;
using SequencesPtr = std::unique_ptr<sdec_sequences, Deleter<sdec_sequences, sdec_sequences_free>>;
using LabelsPtr = std::unique_ptr<sdec_labels, Deleter<sdec_labels, sdec_labels_free>>;
using ConfigPtr = std::unique_ptr<sdec_config, Deleter<sdec_config, sdec_config_free>>;
using AutoencoderPtr = std::unique_ptr<sdec_autoencoder, Deleter<sdec_autoencoder, sdec_autoencoder_free>>;
using ModelPtr = std::unique_ptr<sdec_cluster_model, Deleter<sdec_cluster_model, sdec_cluster_model_free>>;
using ResultPtr = std::unique_ptr<sdec_cluster_result, Deleter<sdec_cluster_result, sdec_cluster_result_free>>;

struct CString {
  char* p = nullptr;
  ~CString() { sdec_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

ConfigPtr load_config(const std::string& path) {
  sdec_config* c = nullptr;
  if (path.empty()) {
    check(sdec_config_default(&c), "config");
  } else {
    check(sdec_config_load(path.c_str(), &c), "config '" + path + "'");
  }
  return ConfigPtr(c);
}

void override_seed(sdec_config* c, const std::optional<std::uint64_t>& seed) {
  if (seed) check(sdec_config_set(c, "seed", std::to_string(*seed).c_str()), "--seed");
}

std::string config_string(const sdec_config* c, const char* key) {
  CString s;
  check(sdec_config_get_string(c, key, &s.p), key);
  return s.str();
}

double config_number(const sdec_config* c, const char* key) {
  double v = 0.0;
  check(sdec_config_get_number(c, key, &v), key);
  return v;
}

MatrixPtr load_matrix(const std::string& path) {
  sdec_matrix* m = nullptr;
  check(sdec_matrix_load(path.c_str(), &m), "'" + path + "'");
  return MatrixPtr(m);
}

LabelsPtr load_labels(const std::string& path, std::size_t k = 0) {
  sdec_labels* l = nullptr;
  check(sdec_labels_load(path.c_str(), k, &l), "'" + path + "'");
  return LabelsPtr(l);
}

void save_labels(const sdec_labels* l, const std::string& path) {
  check(sdec_labels_save(l, path.c_str()), "'" + path + "'");
}

// pool / normalize: token sequences are pooled first, flat vectors only
// normalized.
MatrixPtr prepare_vectors(const std::string& in, const std::string& strategy,
                          const std::string& mode) {
  sdec_file_kind kind{};
  check(sdec_file_kind_of(in.c_str(), &kind), "'" + in + "'");
  MatrixPtr pooled;
  if (kind == SDEC_KIND_SEQUENCES) {
    sdec_sequences* s = nullptr;
    check(sdec_sequences_load(in.c_str(), &s), "'" + in + "'");
    SequencesPtr seqs(s);
    sdec_matrix* m = nullptr;
    check(sdec_pool(seqs.get(), strategy.c_str(), &m), "pool");
    pooled.reset(m);
  } else {
    pooled = load_matrix(in);
  }
  sdec_matrix* out = nullptr;
  check(sdec_normalize(pooled.get(), mode.c_str(), &out), "normalize");
  return MatrixPtr(out);
}

AutoencoderPtr pretrain(const sdec_matrix* data, const sdec_config* cfg) {
  sdec_autoencoder* ae = nullptr;
  check(sdec_pretrain(data, cfg, &ae), "pretrain");
  AutoencoderPtr out(ae);
  std::size_t epochs = 0;
  check(sdec_autoencoder_loss_curve(ae, nullptr, 0, &epochs), "loss curve");
  if (epochs > 0) {
    std::vector<double> curve(epochs);
    check(sdec_autoencoder_loss_curve(ae, curve.data(), curve.size(), &epochs), "loss curve");
    std::fprintf(stderr, "pretrain: %zu epochs, loss %.6g -> %.6g\n", epochs, curve.front(), curve.back());
  }
  if (const auto bad = sdec_autoencoder_degenerate_rows(ae); bad > 0) {
    std::fprintf(stderr, "warning: %zu zero-norm rows took the cosine fallback during pretraining\n", bad);
  }
  return out;
}

AutoencoderPtr load_autoencoder(const std::string& path, const sdec_config* cfg,
                                ModelPtr* model = nullptr) {
  sdec_autoencoder* ae = nullptr;
  sdec_cluster_model* m = nullptr;
  int mismatch = 0;
  check(sdec_checkpoint_load(path.c_str(), cfg, &ae, &m, &mismatch), "'" + path + "'");
  if (mismatch) {
    std::fprintf(stderr, "warning: checkpoint '%s' was written with a different config\n", path.c_str());
  }
  if (model) {
    model->reset(m);
  } else {
    sdec_cluster_model_free(m);
  }
  return AutoencoderPtr(ae);
}

ResultPtr cluster(const sdec_matrix* data, const sdec_autoencoder* ae, std::size_t k,
                  const sdec_config* cfg) {
  sdec_cluster_result* r = nullptr;
  check(sdec_cluster(data, ae, k, cfg, &r), "cluster");
  ResultPtr out(r);
  if (sdec_cluster_result_stop_reason(r) == SDEC_STOP_MAX_ITERATIONS) {
    std::fprintf(stderr, "warning: fine-tuning reached max_iterations without converging\n");
  }
  return out;
}

LabelsPtr refine(const sdec_matrix* data, const sdec_labels* labels, std::size_t k, double lambda,
                 std::size_t max_passes, const std::string& log_path) {
  sdec_labels* out = nullptr;
  sdec_refine_stats stats{};
  check(sdec_refine(data, labels, k, lambda, max_passes, log_path.empty() ? nullptr : log_path.c_str(),
                    &out, &stats),
        "refine");
  std::fprintf(stderr, "refine: %zu passes, %zu reassignments\n", stats.passes, stats.reassigned);
  if (stats.degenerate_pairs > 0) {
    std::fprintf(stderr, "warning: %zu zero-norm point/centroid pairs scored as -1\n", stats.degenerate_pairs);
  }
  if (stats.emptied_cluster) std::fprintf(stderr, "warning: refinement emptied a cluster\n");
  return LabelsPtr(out);
}

std::string evaluate_json(const sdec_labels* y_true, const sdec_labels* y_pred) {
  CString json;
  check(sdec_evaluate(y_true, y_pred, nullptr, &json.p), "eval");
  return json.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw CliError{kExitMissingFile, "cannot write '" + path + "'"};
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const auto v = std::strtoull(item.c_str(), &end, 10);
    if (item.empty() || *end != '\0' || v == 0) throw CliError{kExitUsage, "bad --sizes entry '" + item + "'"};
    sizes.push_back(v);
  }
  if (sizes.empty()) throw CliError{kExitUsage, "--sizes is empty"};
  return sizes;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("SDEC_THREADS")) {
    sdec_set_threads(std::strtoull(env, nullptr, 10));
  } else {
    sdec_set_threads(0);
  }

  CLI::App app{"sdec: semantic deep embedded clustering of embedding vectors"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1, 1);

  // pool
  std::string pool_in, pool_out, pool_strategy = "mean", pool_norm = "unit_norm";
  auto* pool_cmd = app.add_subcommand("pool", "Pool token sequences and normalize vectors");
  pool_cmd->add_option("--in", pool_in, "Embedding file (token sequences or vectors)")->required();
  pool_cmd->add_option("--strategy", pool_strategy, "cls | last | mean | max")
      ->check(CLI::IsMember({"cls", "last", "mean", "max"}));
  pool_cmd->add_option("--normalize", pool_norm, "unit_norm | layer_norm | feature_standardize | none")
      ->check(CLI::IsMember({"unit_norm", "layer_norm", "feature_standardize", "none"}));
  pool_cmd->add_option("--out", pool_out, "Output vector file")->required();

  // pretrain
  std::string pre_in, pre_config, pre_out;
  std::optional<std::uint64_t> pre_seed;
  auto* pre_cmd = app.add_subcommand("pretrain", "Pretrain the autoencoder");
  pre_cmd->add_option("--in", pre_in, "Vector file")->required();
  pre_cmd->add_option("--config", pre_config, "Run config JSON");
  pre_cmd->add_option("--seed", pre_seed, "Override the config seed");
  pre_cmd->add_option("--out", pre_out, "Checkpoint output")->required();

  // cluster
  std::string cl_in, cl_ae, cl_config, cl_out, cl_history, cl_checkpoint;
  long long cl_k = 0;
  std::optional<std::uint64_t> cl_seed;
  auto* cl_cmd = app.add_subcommand("cluster", "Joint KL fine-tuning and hard labels");
  cl_cmd->add_option("--in", cl_in, "Vector file")->required();
  cl_cmd->add_option("--ae", cl_ae, "Pretrained checkpoint")->required();
  cl_cmd->add_option("--k", cl_k, "Number of clusters")->required();
  cl_cmd->add_option("--config", cl_config, "Run config JSON");
  cl_cmd->add_option("--seed", cl_seed, "Override the config seed");
  cl_cmd->add_option("--out", cl_out, "Labels CSV output")->required();
  cl_cmd->add_option("--history", cl_history, "History CSV output");
  cl_cmd->add_option("--checkpoint", cl_checkpoint, "Fine-tuned autoencoder + centroids output");

  // refine
  std::string rf_in, rf_labels, rf_out, rf_log, rf_ae;
  double rf_lambda = 0.2;
  long long rf_k = 0;
  std::size_t rf_passes = 10;
  auto* rf_cmd = app.add_subcommand("refine", "Cosine-similarity label refinement");
  rf_cmd->add_option("--in", rf_in, "Vector file")->required();
  rf_cmd->add_option("--labels", rf_labels, "Labels CSV")->required();
  rf_cmd->add_option("--lambda", rf_lambda, "Reassignment margin threshold");
  rf_cmd->add_option("--k", rf_k, "Number of clusters (default: max label + 1)");
  rf_cmd->add_option("--max-passes", rf_passes, "Pass limit");
  rf_cmd->add_option("--ae", rf_ae, "Refine in this checkpoint's latent space");
  rf_cmd->add_option("--log", rf_log, "Reassignment log CSV output");
  rf_cmd->add_option("--out", rf_out, "Refined labels CSV output")->required();

  // eval
  std::string ev_pred, ev_true;
  auto* ev_cmd = app.add_subcommand("eval", "ACC / NMI / ARI as JSON on stdout");
  ev_cmd->add_option("--pred", ev_pred, "Predicted labels CSV")->required();
  ev_cmd->add_option("--true", ev_true, "Ground-truth labels CSV")->required();

  // pipeline
  std::string pl_config;
  std::optional<std::uint64_t> pl_seed;
  auto* pl_cmd = app.add_subcommand("pipeline", "pool -> pretrain -> cluster -> refine -> eval");
  pl_cmd->add_option("--config", pl_config, "Run config JSON (input, k, out_dir, true_labels)")->required();
  pl_cmd->add_option("--seed", pl_seed, "Override the config seed");

  // synth
  std::size_t sy_blobs = 4, sy_n = 2000, sy_dim = 32;
  double sy_sep = 10.0;
  std::uint64_t sy_seed = 0;
  std::string sy_out, sy_labels;
  auto* sy_cmd = app.add_subcommand("synth", "Generate Gaussian blob data");
  sy_cmd->add_option("--blobs", sy_blobs, "Number of blobs");
  sy_cmd->add_option("--n", sy_n, "Number of points");
  sy_cmd->add_option("--dim", sy_dim, "Dimension");
  sy_cmd->add_option("--sep", sy_sep, "Pairwise centre distance in units of sigma");
  sy_cmd->add_option("--seed", sy_seed, "Seed");
  sy_cmd->add_option("--out", sy_out, "Vector file output")->required();
  sy_cmd->add_option("--labels", sy_labels, "Labels CSV output")->required();

  // bench
  std::string bn_config, bn_sizes = "500,1000,2000,4000";
  std::size_t bn_dim = 32, bn_repeats = 5;
  double bn_sep = 10.0;
  std::optional<std::uint64_t> bn_seed;
  auto* bn_cmd = app.add_subcommand("bench", "Training / assignment time versus n (CSV on stdout)");
  bn_cmd->add_option("--config", bn_config, "Run config JSON");
  bn_cmd->add_option("--sizes", bn_sizes, "Comma-separated sample counts");
  bn_cmd->add_option("--dim", bn_dim, "Synthetic data dimension");
  bn_cmd->add_option("--sep", bn_sep, "Synthetic blob separation");
  bn_cmd->add_option("--repeats", bn_repeats, "Assignment timing repeats (min is reported)");
  bn_cmd->add_option("--seed", bn_seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*pool_cmd) {
      auto vecs = prepare_vectors(pool_in, pool_strategy, pool_norm);
      check(sdec_matrix_save(vecs.get(), pool_out.c_str()), "'" + pool_out + "'");
    } else if (*pre_cmd) {
      auto cfg = load_config(pre_config);
      override_seed(cfg.get(), pre_seed);
      auto data = load_matrix(pre_in);
      auto ae = pretrain(data.get(), cfg.get());
      check(sdec_checkpoint_save(pre_out.c_str(), ae.get(), nullptr, cfg.get()), "'" + pre_out + "'");
    } else if (*cl_cmd) {
      if (cl_k < 1) throw CliError{kExitUsage, "--k must be >= 1"};
      auto cfg = load_config(cl_config);
      override_seed(cfg.get(), cl_seed);
      auto data = load_matrix(cl_in);
      auto ae = load_autoencoder(cl_ae, cfg.get());
      auto result = cluster(data.get(), ae.get(), static_cast<std::size_t>(cl_k), cfg.get());
      sdec_labels* l = nullptr;
      check(sdec_cluster_result_labels(result.get(), &l), "labels");
      LabelsPtr labels(l);
      save_labels(labels.get(), cl_out);
      if (!cl_history.empty()) {
        check(sdec_cluster_result_save_history(result.get(), cl_history.c_str()), "'" + cl_history + "'");
      }
      if (!cl_checkpoint.empty()) {
        sdec_autoencoder* tuned = nullptr;
        sdec_cluster_model* model = nullptr;
        check(sdec_cluster_result_autoencoder(result.get(), &tuned), "autoencoder");
        AutoencoderPtr tuned_ptr(tuned);
        check(sdec_cluster_result_model(result.get(), &model), "model");
        ModelPtr model_ptr(model);
        check(sdec_checkpoint_save(cl_checkpoint.c_str(), tuned, model, cfg.get()), "'" + cl_checkpoint + "'");
      }
    } else if (*rf_cmd) {
      if (rf_k < 0) throw CliError{kExitUsage, "--k must be >= 0"};
      if (rf_lambda < 0.0) throw CliError{kExitUsage, "--lambda must be >= 0"};
      if (rf_passes < 1) throw CliError{kExitUsage, "--max-passes must be >= 1"};
      auto data = load_matrix(rf_in);
      auto labels = load_labels(rf_labels, static_cast<std::size_t>(rf_k));
      if (!rf_ae.empty()) {
        auto ae = load_autoencoder(rf_ae, nullptr);
        sdec_matrix* z = nullptr;
        check(sdec_autoencoder_encode(ae.get(), data.get(), &z), "encode");
        data.reset(z);
      }
      auto refined = refine(data.get(), labels.get(), static_cast<std::size_t>(rf_k), rf_lambda, rf_passes, rf_log);
      save_labels(refined.get(), rf_out);
    } else if (*ev_cmd) {
      auto pred = load_labels(ev_pred);
      auto truth = load_labels(ev_true);
      std::printf("%s\n", evaluate_json(truth.get(), pred.get()).c_str());
    } else if (*pl_cmd) {
      auto cfg = load_config(pl_config);
      override_seed(cfg.get(), pl_seed);
      const std::string input = config_string(cfg.get(), "input");
      const std::string truth_path = config_string(cfg.get(), "true_labels");
      std::string out_dir = config_string(cfg.get(), "out_dir");
      const auto k = static_cast<std::size_t>(config_number(cfg.get(), "k"));
      if (input.empty()) throw CliError{kExitConfig, "pipeline: config needs 'input'"};
      if (k < 1) throw CliError{kExitUsage, "pipeline: config needs k >= 1"};
      if (out_dir.empty()) out_dir = ".";
      std::filesystem::create_directories(out_dir);
      const auto at = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };

      // Each stage goes through its file so the run matches chained subcommands.
      {
        auto vecs = prepare_vectors(input, config_string(cfg.get(), "pooling"),
                                    config_string(cfg.get(), "normalization"));
        check(sdec_matrix_save(vecs.get(), at("vecs.sdec").c_str()), "vecs.sdec");
      }
      auto data = load_matrix(at("vecs.sdec"));
      {
        auto ae = pretrain(data.get(), cfg.get());
        check(sdec_checkpoint_save(at("ae.ckpt").c_str(), ae.get(), nullptr, cfg.get()), "ae.ckpt");
      }
      auto ae = load_autoencoder(at("ae.ckpt"), cfg.get());
      auto result = cluster(data.get(), ae.get(), k, cfg.get());
      sdec_labels* l = nullptr;
      check(sdec_cluster_result_labels(result.get(), &l), "labels");
      LabelsPtr labels(l);
      save_labels(labels.get(), at("labels.csv"));
      check(sdec_cluster_result_save_history(result.get(), at("history.csv").c_str()), "history.csv");
      sdec_autoencoder* tuned = nullptr;
      sdec_cluster_model* model = nullptr;
      check(sdec_cluster_result_autoencoder(result.get(), &tuned), "autoencoder");
      AutoencoderPtr tuned_ptr(tuned);
      check(sdec_cluster_result_model(result.get(), &model), "model");
      ModelPtr model_ptr(model);
      check(sdec_checkpoint_save(at("cluster.ckpt").c_str(), tuned, model, cfg.get()), "cluster.ckpt");

      const sdec_labels* final_labels = labels.get();
      LabelsPtr refined;
      if (config_number(cfg.get(), "refine") != 0.0) {
        MatrixPtr space;
        const sdec_matrix* refine_on = data.get();
        if (config_string(cfg.get(), "refine_space") == "latent") {
          sdec_matrix* z = nullptr;
          check(sdec_autoencoder_encode(tuned, data.get(), &z), "encode");
          space.reset(z);
          refine_on = z;
        }
        refined = refine(refine_on, labels.get(), k, config_number(cfg.get(), "lambda"),
                         static_cast<std::size_t>(config_number(cfg.get(), "refine_max_passes")),
                         at("refine_log.csv"));
        save_labels(refined.get(), at("labels_refined.csv"));
        final_labels = refined.get();
      }
      if (!truth_path.empty()) {
        auto truth = load_labels(truth_path);
        const auto cluster_json = evaluate_json(truth.get(), labels.get());
        write_text(at("metrics_cluster.json"), cluster_json + "\n");
        if (refined) write_text(at("metrics_refined.json"), evaluate_json(truth.get(), refined.get()) + "\n");
        const auto final_json = evaluate_json(truth.get(), final_labels);
        write_text(at("metrics.json"), final_json + "\n");
        std::printf("%s\n", final_json.c_str());
      }
    } else if (*sy_cmd) {
      sdec_matrix* m = nullptr;
      sdec_labels* l = nullptr;
      check(sdec_synth_blobs(sy_blobs, sy_n, sy_dim, sy_sep, sy_seed, &m, &l), "synth");
      MatrixPtr points(m);
      LabelsPtr labels(l);
      check(sdec_matrix_save(points.get(), sy_out.c_str()), "'" + sy_out + "'");
      save_labels(labels.get(), sy_labels);
    } else if (*bn_cmd) {
      const auto sizes = parse_sizes(bn_sizes);
      if (bn_repeats < 1) throw CliError{kExitUsage, "--repeats must be >= 1"};
      auto cfg = load_config(bn_config);
      override_seed(cfg.get(), bn_seed);
      // Fixed schedule: convergence checks off so work depends on n alone.
      check(sdec_config_set(cfg.get(), "delta_tol", "0"), "bench");
      check(sdec_config_set(cfg.get(), "kl_tol", "0"), "bench");
      std::size_t k = static_cast<std::size_t>(config_number(cfg.get(), "k"));
      if (k == 0) k = 4;
      const auto seed = static_cast<std::uint64_t>(config_number(cfg.get(), "seed"));
      const std::string mode = config_string(cfg.get(), "normalization");
      std::printf("n,train_seconds,assign_seconds\n");
      for (const auto n : sizes) {
        sdec_matrix* m = nullptr;
        sdec_labels* l = nullptr;
        check(sdec_synth_blobs(k, n, bn_dim, bn_sep, seed, &m, &l), "synth");
        MatrixPtr raw(m);
        LabelsPtr truth(l);
        sdec_matrix* normed = nullptr;
        check(sdec_normalize(raw.get(), mode.c_str(), &normed), "normalize");
        MatrixPtr data(normed);

        const auto t0 = std::chrono::steady_clock::now();
        auto ae = pretrain(data.get(), cfg.get());
        auto result = cluster(data.get(), ae.get(), k, cfg.get());
        const double train = seconds_since(t0);

        sdec_autoencoder* tuned = nullptr;
        sdec_cluster_model* model = nullptr;
        check(sdec_cluster_result_autoencoder(result.get(), &tuned), "autoencoder");
        AutoencoderPtr tuned_ptr(tuned);
        check(sdec_cluster_result_model(result.get(), &model), "model");
        ModelPtr model_ptr(model);
        double assign = 0.0;
        for (std::size_t r = 0; r < bn_repeats; ++r) {
          sdec_labels* out = nullptr;
          const auto a0 = std::chrono::steady_clock::now();
          check(sdec_assign(tuned, model, data.get(), &out), "assign");
          const double t = seconds_since(a0);
          sdec_labels_free(out);
          assign = r == 0 ? t : std::min(assign, t);
        }
        std::printf("%zu,%.6f,%.6f\n", n, train, assign);
        std::fflush(stdout);
      }
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "sdec: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sdec: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}
