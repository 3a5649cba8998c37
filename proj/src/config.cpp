#include "sdec/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sdec {

using nlohmann::json;

namespace {

[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw Error(ErrorCode::config, "config key '" + key + "': expected " + expected);
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) type_error(key, "a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer()) type_error(key, "a non-negative integer");
  if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
    type_error(key, "a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) type_error(key, "a boolean");
  return v.get<bool>();
}

std::string_view to_string(RefineSpace s) { return s == RefineSpace::input ? "input" : "latent"; }

}  // namespace

AutoencoderConfig RunConfig::autoencoder(std::size_t input_dim) const {
  AutoencoderConfig c;
  c.layer_dims.push_back(input_dim);
  c.layer_dims.insert(c.layer_dims.end(), encoder_dims.begin(), encoder_dims.end());
  c.l2_coefficient = l2;
  c.epochs = ae_epochs;
  c.batch_size = ae_batch_size;
  c.learning_rate = ae_learning_rate;
  c.epsilon_weight = epsilon_weight;
  c.seed = derive_seed(seed, "pretrain");
  return c;
}

FineTuneConfig RunConfig::finetune() const {
  FineTuneConfig c;
  c.gamma = gamma;
  c.sgd_lr = sgd_lr;
  c.sgd_momentum = sgd_momentum;
  c.batch_size = cluster_batch_size;
  c.update_interval = update_interval;
  c.max_iterations = max_iterations;
  c.delta_tol = delta_tol;
  c.kl_tol = kl_tol;
  c.kmeans_restarts = kmeans_restarts;
  c.alpha = alpha;
  c.seed = derive_seed(seed, "cluster");
  return c;
}

RefineConfig RunConfig::refine_config() const {
  return RefineConfig{lambda, refine_max_passes};
}

void RunConfig::validate() const {
  if (encoder_dims.empty()) throw Error(ErrorCode::config, "encoder_dims must not be empty");
  for (const auto d : encoder_dims) {
    if (d == 0) throw Error(ErrorCode::config, "encoder_dims entries must be positive");
  }
  try {
    autoencoder(1).validate();
    finetune().validate();
    refine_config().validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config, e.what());
  }
}

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");

  RunConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "encoder_dims") {
      if (!v.is_array()) type_error(key, "an array of positive integers");
      c.encoder_dims.clear();
      for (const auto& d : v) c.encoder_dims.push_back(get_count(d, key));
    } else if (key == "l2") {
      c.l2 = get_number(v, key);
    } else if (key == "ae_epochs") {
      c.ae_epochs = get_count(v, key);
    } else if (key == "ae_batch_size") {
      c.ae_batch_size = get_count(v, key);
    } else if (key == "ae_learning_rate") {
      c.ae_learning_rate = get_number(v, key);
    } else if (key == "epsilon_weight") {
      c.epsilon_weight = get_number(v, key);
    } else if (key == "alpha") {
      c.alpha = get_number(v, key);
    } else if (key == "gamma") {
      c.gamma = get_number(v, key);
    } else if (key == "sgd_lr") {
      c.sgd_lr = get_number(v, key);
    } else if (key == "sgd_momentum") {
      c.sgd_momentum = get_number(v, key);
    } else if (key == "cluster_batch_size") {
      c.cluster_batch_size = get_count(v, key);
    } else if (key == "update_interval") {
      c.update_interval = get_count(v, key);
    } else if (key == "max_iterations") {
      c.max_iterations = get_count(v, key);
    } else if (key == "delta_tol") {
      c.delta_tol = get_number(v, key);
    } else if (key == "kl_tol") {
      c.kl_tol = get_number(v, key);
    } else if (key == "kmeans_restarts") {
      c.kmeans_restarts = get_count(v, key);
    } else if (key == "k") {
      c.k = get_count(v, key);
    } else if (key == "refine") {
      c.refine = get_bool(v, key);
    } else if (key == "lambda") {
      c.lambda = get_number(v, key);
    } else if (key == "refine_max_passes") {
      c.refine_max_passes = get_count(v, key);
    } else if (key == "refine_space") {
      const auto s = get_string(v, key);
      if (s == "input") c.refine_space = RefineSpace::input;
      else if (s == "latent") c.refine_space = RefineSpace::latent;
      else throw Error(ErrorCode::config, "refine_space must be 'input' or 'latent'");
    } else if (key == "pooling") {
      try {
        c.pooling = parse_pooling(get_string(v, key));
      } catch (const Error& e) {
        throw Error(ErrorCode::config, e.what());
      }
    } else if (key == "normalization") {
      try {
        c.normalization = parse_normalization(get_string(v, key));
      } catch (const Error& e) {
        throw Error(ErrorCode::config, e.what());
      }
    } else if (key == "seed") {
      c.seed = get_count(v, key);
    } else if (key == "input") {
      c.input = get_string(v, key);
    } else if (key == "true_labels") {
      c.true_labels = get_string(v, key);
    } else if (key == "out_dir") {
      c.out_dir = get_string(v, key);
    } else {
      throw Error(ErrorCode::config, "unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["encoder_dims"] = c.encoder_dims;
  j["l2"] = c.l2;
  j["ae_epochs"] = c.ae_epochs;
  j["ae_batch_size"] = c.ae_batch_size;
  j["ae_learning_rate"] = c.ae_learning_rate;
  j["epsilon_weight"] = c.epsilon_weight;
  j["alpha"] = c.alpha;
  j["gamma"] = c.gamma;
  j["sgd_lr"] = c.sgd_lr;
  j["sgd_momentum"] = c.sgd_momentum;
  j["cluster_batch_size"] = c.cluster_batch_size;
  j["update_interval"] = c.update_interval;
  j["max_iterations"] = c.max_iterations;
  j["delta_tol"] = c.delta_tol;
  j["kl_tol"] = c.kl_tol;
  j["kmeans_restarts"] = c.kmeans_restarts;
  j["k"] = c.k;
  j["refine"] = c.refine;
  j["lambda"] = c.lambda;
  j["refine_max_passes"] = c.refine_max_passes;
  j["refine_space"] = std::string(to_string(c.refine_space));
  j["pooling"] = std::string(to_string(c.pooling));
  j["normalization"] = std::string(to_string(c.normalization));
  j["seed"] = c.seed;
  j["input"] = c.input;
  j["true_labels"] = c.true_labels;
  j["out_dir"] = c.out_dir;
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& config) {
  RunConfig tunables = config;
  tunables.input.clear();
  tunables.true_labels.clear();
  tunables.out_dir.clear();
  const std::string text = config_to_json(tunables);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace sdec
