#pragma once

#include <cstdint>
#include <vector>

#include "sdec/numeric.hpp"

namespace sdec {

inline constexpr double kSeluLambda = 1.05070098735548;
inline constexpr double kSeluAlpha = 1.67326324235437;

double selu(double x);
double selu_derivative(double x);

struct AutoencoderConfig {
  // Encoder widths starting at the input dim; the last entry is the
  // bottleneck. The decoder mirrors it back to the input dim.
  std::vector<std::size_t> layer_dims;
  double l2_coefficient = 1e-4;
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  double epsilon_weight = 1e-8;
  std::uint64_t seed = 0;

  // The default hidden stack d-2048-1024-512-256-128.
  static std::vector<std::size_t> default_hidden_dims();
  void validate() const;
};

// y = x W^T + b, W is out x in.
struct DenseLayer {
  Matrix weights;
  std::vector<double> bias;

  std::size_t in_dim() const noexcept { return weights.cols(); }
  std::size_t out_dim() const noexcept { return weights.rows(); }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Encoder layers use SeLU throughout (bottleneck included); decoder hidden
// layers use SeLU and the output layer is linear.
struct AutoencoderParams {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;

  std::size_t input_dim() const;
  std::size_t latent_dim() const;
  std::size_t parameter_count() const;
  std::vector<std::size_t> layer_dims() const;

  // Same shapes, all zeros. Used for gradients and optimizer moments.
  AutoencoderParams zeros_like() const;
  // Every weight and bias buffer, encoder first, weights before biases.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;

  bool all_finite() const;

  friend bool operator==(const AutoencoderParams&, const AutoencoderParams&) = default;
};

// Zero biases, weights ~ N(0, 1/fan_in).
AutoencoderParams init_params(std::span<const std::size_t> layer_dims, Rng& rng);

struct ForwardCache {
  // activations[0] is the batch; activations[l + 1] is the output of layer l
  // over the concatenated encoder+decoder stack. pre_activations[l] feeds it.
  std::vector<Matrix> activations;
  std::vector<Matrix> pre_activations;
};

struct ForwardResult {
  Matrix latent;
  Matrix reconstruction;
  ForwardCache cache;
};

ForwardResult forward(const AutoencoderParams& params, const Matrix& batch);
Matrix encode(const AutoencoderParams& params, const Matrix& data);

struct ReconLossReport {
  double l_mse = 0.0;
  double l_cosine = 0.0;
  double w_mse = 0.0;
  double w_cosine = 0.0;
  double l_recon = 0.0;
  // Rows whose cosine term fell back to 1 (zero-norm row).
  std::size_t degenerate_rows = 0;
};

ReconLossReport recon_loss(const Matrix& batch, const Matrix& reconstruction,
                           double epsilon);

struct ReconLossGradient {
  ReconLossReport report;
  // d l_recon / d reconstruction with the dynamic weights held constant.
  Matrix d_reconstruction;
};

ReconLossGradient recon_loss_gradient(const Matrix& batch,
                                      const Matrix& reconstruction,
                                      double epsilon);

struct BackwardResult {
  AutoencoderParams grads;
  ReconLossReport report;
};

// Gradient of l_recon + l2 * sum ||W||^2. latent_grad, when given, is an
// extra d(loss)/d(latent) (the clustering term) added at the bottleneck.
BackwardResult backward(const AutoencoderParams& params,
                        const ForwardCache& cache, const Matrix& batch,
                        double epsilon, double l2,
                        const Matrix* latent_grad = nullptr);

struct AdamState {
  AutoencoderParams m;
  AutoencoderParams v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_params(const AutoencoderParams& params);
};

void adam_step(AutoencoderParams& params, const AutoencoderParams& grads,
               AdamState& state, double lr);

struct PretrainResult {
  AutoencoderParams params;
  std::vector<double> loss_curve;  // per-epoch mean l_recon
  std::size_t degenerate_rows = 0;  // summed over all batches
};

PretrainResult pretrain(const Matrix& data, const AutoencoderConfig& config);

}  // namespace sdec
