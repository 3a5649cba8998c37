#pragma once

#include <cstdint>
#include <vector>

#include "sdec/autoencoder.hpp"
#include "sdec/numeric.hpp"

namespace sdec {

struct ClusterModel {
  Matrix centroids;  // k x d_z
  double alpha = 1.0;

  std::size_t k() const noexcept { return centroids.rows(); }

  friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

struct KMeansResult {
  ClusterModel model;
  Labels labels;
  double inertia = 0.0;
  std::size_t iterations = 0;  // Lloyd iterations of the winning restart
};

inline constexpr std::size_t kLloydMaxIterations = 300;
inline constexpr double kLloydTolerance = 1e-6;

// Best of `restarts` k-means++ seedings, each refined by Lloyd iterations
// until no centroid moves more than kLloydTolerance.
KMeansResult kmeanspp_init(const Matrix& z, std::size_t k, std::size_t restarts,
                           Rng& rng, double alpha = 1.0);

// Student's-t kernel assignments; rows sum to 1.
Matrix soft_assign(const Matrix& z, const ClusterModel& model);

// p_ij proportional to q_ij^2 / f_j, f_j = sum_i q_ij.
Matrix target_distribution(const Matrix& q);

// sum_ij p_ij log(p_ij / q_ij) for row-stochastic p and q; 0 log 0 := 0.
// Never negative.
double kl_loss(const Matrix& p, const Matrix& q);

// Row argmax, ties to the lowest index.
Labels hard_labels(const Matrix& q);

struct ClusteringGradients {
  Matrix grad_z;          // n x d_z
  Matrix grad_centroids;  // k x d_z
};

// Gradients of kl_loss(p, soft_assign(z, model)) with p held fixed.
ClusteringGradients clustering_gradients(const Matrix& z, const ClusterModel& model,
                                         const Matrix& p, const Matrix& q);

struct FineTuneConfig {
  double gamma = 0.1;
  double sgd_lr = 0.01;
  double sgd_momentum = 0.9;
  std::size_t batch_size = 32;
  std::size_t update_interval = 10;
  std::size_t max_iterations = 20000;
  double delta_tol = 0.001;
  double kl_tol = 0.001;
  std::size_t kmeans_restarts = 20;
  double alpha = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AssignmentState {
  Matrix q;
  Matrix p;
  Labels labels;
};

struct HistoryEntry {
  std::size_t iteration = 0;
  double kl = 0.0;     // mean per point over the full dataset
  double recon = 0.0;  // l_recon over the full dataset
  double delta_label = 0.0;  // NaN on the first update
};

enum class StopReason { delta_label, kl_change, max_iterations };

struct FineTuneResult {
  AutoencoderParams params;
  ClusterModel model;
  AssignmentState state;
  std::vector<HistoryEntry> history;
  StopReason stop_reason = StopReason::max_iterations;
  Labels initial_labels;  // k-means labels on the pretrained latent space
};

// Seed derivation: "kmeans" for the k-means++ restarts, "finetune_shuffle"
// for mini-batch order.
FineTuneResult joint_finetune(AutoencoderParams params, const Matrix& data,
                              std::size_t k, const FineTuneConfig& ftc,
                              const AutoencoderConfig& aec);

}  // namespace sdec
