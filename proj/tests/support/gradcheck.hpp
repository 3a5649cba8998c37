#pragma once

// Finite-difference gradient checks over random small instances, shared by the
// unit tests and the acceptance gate.

#include <algorithm>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "sdec/autoencoder.hpp"
#include "sdec/clustering.hpp"

namespace gradcheck {

using sdec::AutoencoderParams;
using sdec::Matrix;
using sdec::Rng;

inline constexpr double kStep = 1e-5;

struct Instance {
  AutoencoderParams params;
  Matrix batch;
  double l2 = 0.0;
  double epsilon = 1e-8;
};

inline Instance random_autoencoder(Rng& rng) {
  Instance inst;
  const auto d = gen::between(rng, 2, 6);
  std::vector<std::size_t> dims{d};
  const auto depth = gen::between(rng, 1, 3);
  for (std::size_t l = 0; l < depth; ++l) dims.push_back(gen::between(rng, 1, 5));
  inst.params = sdec::init_params(dims, rng);
  // Nonzero biases so every code path (both SeLU branches) is exercised.
  for (auto* stack : {&inst.params.encoder, &inst.params.decoder})
    for (auto& l : *stack)
      for (auto& b : l.bias) b = 0.3 * rng.gaussian();
  inst.batch = gen::gaussian_matrix(rng, gen::between(rng, 1, 4), d);
  inst.l2 = rng.uniform() < 0.5 ? 0.0 : gen::uniform(rng, 1e-4, 1e-1);
  return inst;
}

// Reconstruction objective with the dynamic weights frozen at the values the
// library reports for the unperturbed batch.
inline double max_autoencoder_error(Instance& inst, const Matrix* latent_grad = nullptr,
                                    const Matrix* latent_target = nullptr) {
  const auto fwd = sdec::forward(inst.params, inst.batch);
  const auto bwd = sdec::backward(inst.params, fwd.cache, inst.batch, inst.epsilon, inst.l2, latent_grad);
  const double wm = bwd.report.w_mse;
  const double wc = bwd.report.w_cosine;
  const std::size_t bottleneck = inst.params.encoder.size();

  // latent_target supplies a linear term <latent, G>: its gradient wrt the
  // latent code is G itself, which is what latent_grad injects.
  const auto objective = [&] {
    const auto layers = oracle::ae_layers(inst.params, inst.batch);
    const Matrix& recon = layers.back();
    double v = wm * oracle::mse(inst.batch, recon) + wc * oracle::mean_cosine_loss(inst.batch, recon) +
               oracle::weight_penalty(inst.params, inst.l2);
    if (latent_target) {
      const Matrix& z = layers[bottleneck];
      for (std::size_t k = 0; k < z.size(); ++k) v += z.data()[k] * latent_target->data()[k];
    }
    return v;
  };

  auto params = inst.params.tensors();
  const auto grads = bwd.grads.tensors();
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k = 0; k < params[t].size(); ++k) {
      const double fd = oracle::central_difference(objective, params[t][k], kStep);
      worst = std::max(worst, oracle::relative_error(grads[t][k], fd));
    }
  }
  return worst;
}

struct KlInstance {
  Matrix z;
  sdec::ClusterModel model;
  Matrix p;
};

inline KlInstance random_kl(Rng& rng) {
  KlInstance inst;
  const auto n = gen::between(rng, 2, 8);
  const auto k = gen::between(rng, 2, 5);
  const auto dz = gen::between(rng, 1, 4);
  inst.z = gen::gaussian_matrix(rng, n, dz, 1.5);
  inst.model.centroids = gen::gaussian_matrix(rng, k, dz, 1.5);
  inst.model.alpha = rng.uniform() < 0.5 ? 1.0 : gen::uniform(rng, 0.5, 3.0);
  inst.p = sdec::target_distribution(oracle::soft_assign(inst.z, inst.model.centroids, inst.model.alpha));
  return inst;
}

inline double max_kl_error(KlInstance& inst) {
  const Matrix q = sdec::soft_assign(inst.z, inst.model);
  const auto g = sdec::clustering_gradients(inst.z, inst.model, inst.p, q);
  const auto objective = [&] {
    return oracle::kl(inst.p, oracle::soft_assign(inst.z, inst.model.centroids, inst.model.alpha));
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < inst.z.size(); ++k) {
    const double fd = oracle::central_difference(objective, inst.z.data()[k], kStep);
    worst = std::max(worst, oracle::relative_error(g.grad_z.data()[k], fd));
  }
  for (std::size_t k = 0; k < inst.model.centroids.size(); ++k) {
    const double fd = oracle::central_difference(objective, inst.model.centroids.data()[k], kStep);
    worst = std::max(worst, oracle::relative_error(g.grad_centroids.data()[k], fd));
  }
  return worst;
}

}  // namespace gradcheck
