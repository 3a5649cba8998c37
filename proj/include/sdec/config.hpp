#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sdec/autoencoder.hpp"
#include "sdec/clustering.hpp"
#include "sdec/embed.hpp"
#include "sdec/refine.hpp"

namespace sdec {

enum class RefineSpace { input, latent };

// Every tunable of a run. JSON keys are the member names; unknown keys are
// rejected and absent keys keep the defaults below.
struct RunConfig {
  // autoencoder
  std::vector<std::size_t> encoder_dims = AutoencoderConfig::default_hidden_dims();
  double l2 = 1e-4;
  std::size_t ae_epochs = 100;
  std::size_t ae_batch_size = 16;
  double ae_learning_rate = 1e-3;
  double epsilon_weight = 1e-8;

  // clustering
  double alpha = 1.0;
  double gamma = 0.1;
  double sgd_lr = 0.01;
  double sgd_momentum = 0.9;
  std::size_t cluster_batch_size = 32;
  std::size_t update_interval = 10;
  std::size_t max_iterations = 20000;
  double delta_tol = 0.001;
  double kl_tol = 0.001;
  std::size_t kmeans_restarts = 20;
  std::size_t k = 0;  // 0: must come from the command line

  // refinement
  bool refine = true;
  double lambda = 0.2;
  std::size_t refine_max_passes = 10;
  RefineSpace refine_space = RefineSpace::input;

  // embedding preparation
  PoolingStrategy pooling = PoolingStrategy::mean;
  NormalizationMode normalization = NormalizationMode::unit_norm;

  std::uint64_t seed = 0;

  // pipeline paths
  std::string input;
  std::string true_labels;
  std::string out_dir;

  AutoencoderConfig autoencoder(std::size_t input_dim) const;
  FineTuneConfig finetune() const;
  RefineConfig refine_config() const;

  void validate() const;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
// Canonical JSON with every key present, keys sorted.
std::string config_to_json(const RunConfig& config);
// FNV-1a 64 over config_to_json with the path keys blanked.
std::uint64_t config_hash(const RunConfig& config);

}  // namespace sdec
