#include "sdec/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sdec {

double selu(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
}

double selu_derivative(double x) {
  return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}

std::vector<std::size_t> AutoencoderConfig::default_hidden_dims() {
  return {2048, 1024, 512, 256, 128};
}

void AutoencoderConfig::validate() const {
  if (layer_dims.size() < 2) {
    throw Error(ErrorCode::invalid_argument,
                "layer_dims needs the input dim and at least one encoder layer");
  }
  if (std::any_of(layer_dims.begin(), layer_dims.end(),
                  [](std::size_t d) { return d == 0; })) {
    throw Error(ErrorCode::invalid_argument, "layer_dims entries must be positive");
  }
  if (batch_size == 0) throw Error(ErrorCode::invalid_argument, "batch_size must be >= 1");
  if (l2_coefficient < 0.0) throw Error(ErrorCode::invalid_argument, "l2 must be >= 0");
  if (!(epsilon_weight > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be > 0");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::invalid_argument, "learning rate must be > 0");
}

std::size_t AutoencoderParams::input_dim() const {
  return encoder.empty() ? 0 : encoder.front().in_dim();
}

std::size_t AutoencoderParams::latent_dim() const {
  return encoder.empty() ? 0 : encoder.back().out_dim();
}

std::size_t AutoencoderParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

std::vector<std::size_t> AutoencoderParams::layer_dims() const {
  std::vector<std::size_t> dims;
  if (encoder.empty()) return dims;
  dims.push_back(input_dim());
  for (const auto& l : encoder) dims.push_back(l.out_dim());
  return dims;
}

AutoencoderParams AutoencoderParams::zeros_like() const {
  AutoencoderParams z;
  auto copy_shape = [](const std::vector<DenseLayer>& src, std::vector<DenseLayer>& dst) {
    for (const auto& l : src) {
      dst.push_back({Matrix(l.weights.rows(), l.weights.cols()),
                     std::vector<double>(l.bias.size(), 0.0)});
    }
  };
  copy_shape(encoder, z.encoder);
  copy_shape(decoder, z.decoder);
  return z;
}

std::vector<std::span<double>> AutoencoderParams::tensors() {
  std::vector<std::span<double>> out;
  for (auto* stack : {&encoder, &decoder}) {
    for (auto& l : *stack) {
      out.emplace_back(l.weights.data());
      out.emplace_back(l.bias);
    }
  }
  return out;
}

std::vector<std::span<const double>> AutoencoderParams::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto* stack : {&encoder, &decoder}) {
    for (const auto& l : *stack) {
      out.emplace_back(l.weights.data());
      out.emplace_back(l.bias);
    }
  }
  return out;
}

bool AutoencoderParams::all_finite() const {
  for (const auto& t : tensors()) {
    if (!std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); })) {
      return false;
    }
  }
  return true;
}

AutoencoderParams init_params(std::span<const std::size_t> layer_dims, Rng& rng) {
  if (layer_dims.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "init_params: need at least two dims");
  }
  auto make = [&rng](std::size_t in, std::size_t out) {
    DenseLayer l{Matrix(out, in), std::vector<double>(out, 0.0)};
    const double std_dev = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& w : l.weights.data()) w = std_dev * rng.gaussian();
    return l;
  };
  AutoencoderParams p;
  for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
    p.encoder.push_back(make(layer_dims[i], layer_dims[i + 1]));
  }
  for (std::size_t i = layer_dims.size() - 1; i > 0; --i) {
    p.decoder.push_back(make(layer_dims[i], layer_dims[i - 1]));
  }
  return p;
}

namespace {

// Layers of the concatenated stack, in evaluation order.
std::vector<const DenseLayer*> stack_of(const AutoencoderParams& p) {
  std::vector<const DenseLayer*> s;
  for (const auto& l : p.encoder) s.push_back(&l);
  for (const auto& l : p.decoder) s.push_back(&l);
  return s;
}

Matrix affine(const Matrix& x, const DenseLayer& layer) {
  Matrix z = matmul_transposed_b(x, layer.weights);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto r = z.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += layer.bias[j];
  }
  return z;
}

Matrix apply_selu(const Matrix& pre) {
  Matrix out = pre;
  for (auto& v : out.data()) v = selu(v);
  return out;
}

}  // namespace

ForwardResult forward(const AutoencoderParams& params, const Matrix& batch) {
  if (params.encoder.empty() || params.decoder.empty()) {
    throw Error(ErrorCode::invalid_argument, "forward: empty network");
  }
  if (batch.cols() != params.input_dim()) {
    throw Error(ErrorCode::shape_mismatch,
                "forward: batch width " + std::to_string(batch.cols()) +
                    " != input dim " + std::to_string(params.input_dim()));
  }
  const auto layers = stack_of(params);
  ForwardResult r;
  r.cache.activations.reserve(layers.size() + 1);
  r.cache.pre_activations.reserve(layers.size());
  r.cache.activations.push_back(batch);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix pre = affine(r.cache.activations.back(), *layers[l]);
    const bool linear = l + 1 == layers.size();
    Matrix act = linear ? pre : apply_selu(pre);
    r.cache.pre_activations.push_back(std::move(pre));
    r.cache.activations.push_back(std::move(act));
  }
  r.latent = r.cache.activations[params.encoder.size()];
  r.reconstruction = r.cache.activations.back();
  return r;
}

Matrix encode(const AutoencoderParams& params, const Matrix& data) {
  if (data.cols() != params.input_dim()) {
    throw Error(ErrorCode::shape_mismatch, "encode: data width != input dim");
  }
  Matrix h = data;
  for (const auto& l : params.encoder) h = apply_selu(affine(h, l));
  return h;
}

ReconLossGradient recon_loss_gradient(const Matrix& batch,
                                      const Matrix& reconstruction,
                                      double epsilon) {
  if (batch.rows() != reconstruction.rows() || batch.cols() != reconstruction.cols()) {
    throw Error(ErrorCode::shape_mismatch, "recon_loss: batch/reconstruction shape mismatch");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "recon_loss: epsilon must be > 0");
  const std::size_t n = batch.rows();
  const std::size_t d = batch.cols();
  ReconLossGradient out;
  out.d_reconstruction = Matrix(n, d);
  if (n == 0 || d == 0) return out;

  auto& rep = out.report;
  double sq = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const double e = reconstruction.data()[k] - batch.data()[k];
    sq += e * e;
  }
  rep.l_mse = sq / static_cast<double>(n * d);

  // Per-row cosine and its gradient direction; scaled by the weight below.
  Matrix d_cos(n, d);
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = batch.row(i);
    const auto xh = reconstruction.row(i);
    const double nx = norm(x);
    const double nxh = norm(xh);
    if (nx == 0.0 || nxh == 0.0) {
      ++rep.degenerate_rows;
      cos_sum += 1.0;
      continue;
    }
    const double c = std::clamp(dot(x, xh) / (nx * nxh), -1.0, 1.0);
    cos_sum += 1.0 - c;
    auto g = d_cos.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      // d(1 - cos)/d xh
      g[k] = -(x[k] / (nx * nxh) - c * xh[k] / (nxh * nxh));
    }
  }
  rep.l_cosine = cos_sum / static_cast<double>(n);

  const double denom = rep.l_mse + rep.l_cosine + epsilon;
  rep.w_mse = rep.l_mse / denom;
  rep.w_cosine = rep.l_cosine / denom;
  rep.l_recon = rep.w_mse * rep.l_mse + rep.w_cosine * rep.l_cosine;

  const double mse_scale = rep.w_mse * 2.0 / static_cast<double>(n * d);
  const double cos_scale = rep.w_cosine / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = batch.row(i);
    const auto xh = reconstruction.row(i);
    const auto gc = d_cos.row(i);
    auto g = out.d_reconstruction.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      g[k] = mse_scale * (xh[k] - x[k]) + cos_scale * gc[k];
    }
  }
  return out;
}

ReconLossReport recon_loss(const Matrix& batch, const Matrix& reconstruction,
                           double epsilon) {
  return recon_loss_gradient(batch, reconstruction, epsilon).report;
}

BackwardResult backward(const AutoencoderParams& params,
                        const ForwardCache& cache, const Matrix& batch,
                        double epsilon, double l2, const Matrix* latent_grad) {
  const auto layers = stack_of(params);
  if (cache.activations.size() != layers.size() + 1 ||
      cache.pre_activations.size() != layers.size()) {
    throw Error(ErrorCode::invalid_argument, "backward: cache does not match params");
  }
  auto loss = recon_loss_gradient(batch, cache.activations.back(), epsilon);

  BackwardResult out;
  out.report = loss.report;
  out.grads = params.zeros_like();
  std::vector<DenseLayer*> grad_layers;
  for (auto& l : out.grads.encoder) grad_layers.push_back(&l);
  for (auto& l : out.grads.decoder) grad_layers.push_back(&l);

  const std::size_t bottleneck = params.encoder.size();
  // delta holds d(loss)/d(activation of layer l) while walking backwards.
  Matrix delta = std::move(loss.d_reconstruction);
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (l + 1 == bottleneck && latent_grad != nullptr) {
      if (latent_grad->rows() != delta.rows() || latent_grad->cols() != delta.cols()) {
        throw Error(ErrorCode::shape_mismatch, "backward: latent gradient shape");
      }
      for (std::size_t k = 0; k < delta.size(); ++k) {
        delta.data()[k] += latent_grad->data()[k];
      }
    }
    const bool linear = l + 1 == layers.size();
    if (!linear) {
      const auto pre = cache.pre_activations[l].data();
      auto dd = delta.data();
      for (std::size_t k = 0; k < dd.size(); ++k) dd[k] *= selu_derivative(pre[k]);
    }
    // delta is now d(loss)/d(pre-activation).
    DenseLayer& g = *grad_layers[l];
    g.weights = matmul_transposed_a(delta, cache.activations[l]);
    for (std::size_t i = 0; i < delta.rows(); ++i) {
      const auto r = delta.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) g.bias[j] += r[j];
    }
    if (l2 != 0.0) {
      const auto w = layers[l]->weights.data();
      auto gw = g.weights.data();
      for (std::size_t k = 0; k < gw.size(); ++k) gw[k] += 2.0 * l2 * w[k];
    }
    if (l > 0) delta = matmul(delta, layers[l]->weights);
  }
  return out;
}

AdamState AdamState::for_params(const AutoencoderParams& params) {
  AdamState s;
  s.m = params.zeros_like();
  s.v = params.zeros_like();
  return s;
}

void adam_step(AutoencoderParams& params, const AutoencoderParams& grads,
               AdamState& state, double lr) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw Error(ErrorCode::shape_mismatch, "adam_step: tensor count mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (g[i].size() != p[i].size() || m[i].size() != p[i].size()) {
      throw Error(ErrorCode::shape_mismatch, "adam_step: tensor shape mismatch");
    }
    for (std::size_t k = 0; k < p[i].size(); ++k) {
      m[i][k] = state.beta1 * m[i][k] + (1.0 - state.beta1) * g[i][k];
      v[i][k] = state.beta2 * v[i][k] + (1.0 - state.beta2) * g[i][k] * g[i][k];
      const double mh = m[i][k] / c1;
      const double vh = v[i][k] / c2;
      p[i][k] -= lr * mh / (std::sqrt(vh) + state.epsilon);
    }
  }
}

PretrainResult pretrain(const Matrix& data, const AutoencoderConfig& config) {
  config.validate();
  if (data.rows() == 0) throw Error(ErrorCode::invalid_argument, "pretrain: empty data");
  if (data.cols() != config.layer_dims.front()) {
    throw Error(ErrorCode::shape_mismatch, "pretrain: data width != layer_dims[0]");
  }
  Rng init_rng(derive_seed(config.seed, "ae_init"));
  Rng shuffle_rng(derive_seed(config.seed, "ae_shuffle"));

  PretrainResult result;
  result.params = init_params(config.layer_dims, init_rng);
  auto adam = AdamState::for_params(result.params);

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const Matrix batch = data.gather_rows(std::span(order).subspan(start, stop - start));
      const auto fwd = forward(result.params, batch);
      auto bwd = backward(result.params, fwd.cache, batch, config.epsilon_weight,
                          config.l2_coefficient);
      adam_step(result.params, bwd.grads, adam, config.learning_rate);
      weighted += bwd.report.l_recon * static_cast<double>(batch.rows());
      result.degenerate_rows += bwd.report.degenerate_rows;
    }
    result.loss_curve.push_back(weighted / static_cast<double>(data.rows()));
  }
  return result;
}

}  // namespace sdec
