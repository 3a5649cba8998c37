#include "sdec/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sdec {

namespace {

std::size_t nearest(std::span<const double> x, const Matrix& centroids, double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows(); ++j) {
    const double d = squared_distance(x, centroids.row(j));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

Matrix seed_plus_plus(const Matrix& z, std::size_t k, Rng& rng) {
  const std::size_t n = z.rows();
  Matrix centroids(k, z.cols());
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  auto take = [&](std::size_t c, std::size_t idx) {
    chosen[idx] = true;
    const auto src = z.row(idx);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(z.row(i), src));
    }
  };

  take(0, rng.uniform_index(n));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (const double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a chosen centroid.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    take(c, pick);
  }
  return centroids;
}

KMeansResult lloyd(const Matrix& z, Matrix centroids) {
  const std::size_t n = z.rows();
  const std::size_t k = centroids.rows();
  const std::size_t d = z.cols();
  KMeansResult r;
  r.labels.assign(n, 0);
  for (std::size_t iter = 0; iter < kLloydMaxIterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      r.labels[i] = static_cast<std::int32_t>(nearest(z.row(i), centroids, nullptr));
    }
    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(r.labels[i]);
      auto s = sums.row(j);
      const auto x = z.row(i);
      for (std::size_t c = 0; c < d; ++c) s[c] += x[c];
      ++counts[j];
    }
    double max_move = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;  // empty cluster keeps its centroid
      auto s = sums.row(j);
      for (auto& v : s) v /= static_cast<double>(counts[j]);
      max_move = std::max(max_move, squared_distance(s, centroids.row(j)));
      std::copy(s.begin(), s.end(), centroids.row(j).begin());
    }
    r.iterations = iter + 1;
    if (std::sqrt(max_move) < kLloydTolerance) break;
  }
  r.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dist = 0.0;
    r.labels[i] = static_cast<std::int32_t>(nearest(z.row(i), centroids, &dist));
    r.inertia += dist;
  }
  r.model.centroids = std::move(centroids);
  return r;
}

double kernel(double sq_dist, double alpha) {
  return std::pow(1.0 + sq_dist / alpha, -(alpha + 1.0) / 2.0);
}

void check_distribution_shapes(const Matrix& p, const Matrix& q, const char* op) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw Error(ErrorCode::shape_mismatch, std::string(op) + ": p/q shape mismatch");
  }
}

}  // namespace

KMeansResult kmeanspp_init(const Matrix& z, std::size_t k, std::size_t restarts,
                           Rng& rng, double alpha) {
  if (k == 0) throw Error(ErrorCode::invalid_argument, "kmeans: k must be >= 1");
  if (k > z.rows()) {
    throw Error(ErrorCode::infeasible, "kmeans: k = " + std::to_string(k) +
                                           " exceeds n = " + std::to_string(z.rows()));
  }
  if (!(alpha > 0.0)) throw Error(ErrorCode::invalid_argument, "kmeans: alpha must be > 0");
  restarts = std::max<std::size_t>(restarts, 1);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    auto run = lloyd(z, seed_plus_plus(z, k, rng));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  best.model.alpha = alpha;
  return best;
}

Matrix soft_assign(const Matrix& z, const ClusterModel& model) {
  if (z.cols() != model.centroids.cols()) {
    throw Error(ErrorCode::shape_mismatch, "soft_assign: latent width != centroid width");
  }
  const std::size_t k = model.k();
  Matrix q(z.rows(), k);
  parallel_for(0, z.rows(), [&](std::size_t i) {
    auto row = q.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      row[j] = kernel(squared_distance(z.row(i), model.centroids.row(j)), model.alpha);
      sum += row[j];
    }
    for (auto& v : row) v /= sum;
  });
  return q;
}

Matrix target_distribution(const Matrix& q) {
  const std::size_t k = q.cols();
  std::vector<double> freq(k, 0.0);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto r = q.row(i);
    for (std::size_t j = 0; j < k; ++j) freq[j] += r[j];
  }
  Matrix p(q.rows(), k);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto qr = q.row(i);
    auto pr = p.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      pr[j] = freq[j] > 0.0 ? qr[j] * qr[j] / freq[j] : 0.0;
      sum += pr[j];
    }
    for (auto& v : pr) v /= sum;
  }
  return p;
}

double kl_loss(const Matrix& p, const Matrix& q) {
  check_distribution_shapes(p, q, "kl_loss");
  // Termwise p log(p/q) - p + q, which sums to the same value when rows are
  // distributions. Written as q((1+u) log1p(u) - u), u = (p-q)/q, each term is
  // non-negative and exact near p == q.
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double pv = p.data()[k];
    const double qv = q.data()[k];
    if (pv <= 0.0) {
      total += qv;
      continue;
    }
    if (qv <= 0.0) {
      throw Error(ErrorCode::divergence_infinite, "kl_loss: q == 0 where p > 0");
    }
    const double u = (pv - qv) / qv;
    total += std::max(0.0, qv * ((1.0 + u) * std::log1p(u) - u));
  }
  return total;
}

Labels hard_labels(const Matrix& q) {
  Labels labels(q.rows(), 0);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto r = q.row(i);
    labels[i] = static_cast<std::int32_t>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return labels;
}

ClusteringGradients clustering_gradients(const Matrix& z, const ClusterModel& model,
                                         const Matrix& p, const Matrix& q) {
  check_distribution_shapes(p, q, "clustering_gradients");
  if (z.rows() != q.rows() || q.cols() != model.k() || z.cols() != model.centroids.cols()) {
    throw Error(ErrorCode::shape_mismatch, "clustering_gradients: inconsistent shapes");
  }
  const std::size_t n = z.rows();
  const std::size_t k = model.k();
  const std::size_t d = z.cols();
  const double alpha = model.alpha;
  const double scale = (alpha + 1.0) / alpha;

  ClusteringGradients g{Matrix(n, d), Matrix(k, d)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto zi = z.row(i);
    double row_mass = 0.0;
    for (std::size_t j = 0; j < k; ++j) row_mass += p(i, j);
    auto gz = g.grad_z.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const auto mu = model.centroids.row(j);
      const double dist = squared_distance(zi, mu);
      const double coeff = scale * (p(i, j) - row_mass * q(i, j)) / (1.0 + dist / alpha);
      auto gm = g.grad_centroids.row(j);
      for (std::size_t c = 0; c < d; ++c) {
        const double term = coeff * (zi[c] - mu[c]);
        gz[c] += term;
        gm[c] -= term;
      }
    }
  }
  return g;
}

void FineTuneConfig::validate() const {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::invalid_argument, "gamma must be >= 0");
  if (!(sgd_lr > 0.0)) throw Error(ErrorCode::invalid_argument, "sgd_lr must be > 0");
  if (!(sgd_momentum >= 0.0 && sgd_momentum < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "sgd_momentum must be in [0, 1)");
  }
  if (batch_size == 0) throw Error(ErrorCode::invalid_argument, "cluster batch_size must be >= 1");
  if (update_interval == 0) throw Error(ErrorCode::invalid_argument, "update_interval must be >= 1");
  if (!(delta_tol >= 0.0 && delta_tol < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "delta_tol must be in [0, 1)");
  }
  if (!(kl_tol >= 0.0)) throw Error(ErrorCode::invalid_argument, "kl_tol must be >= 0");
  if (kmeans_restarts == 0) throw Error(ErrorCode::invalid_argument, "kmeans_restarts must be >= 1");
  if (!(alpha > 0.0)) throw Error(ErrorCode::invalid_argument, "alpha must be > 0");
}

namespace {

void momentum_update(std::span<double> param, std::span<double> velocity,
                     std::span<const double> grad, double lr, double momentum) {
  for (std::size_t k = 0; k < param.size(); ++k) {
    velocity[k] = momentum * velocity[k] - lr * grad[k];
    param[k] += velocity[k];
  }
}

}  // namespace

FineTuneResult joint_finetune(AutoencoderParams params, const Matrix& data,
                              std::size_t k, const FineTuneConfig& ftc,
                              const AutoencoderConfig& aec) {
  ftc.validate();
  if (k == 0) throw Error(ErrorCode::invalid_argument, "joint_finetune: k must be >= 1");
  if (data.rows() < k) {
    throw Error(ErrorCode::infeasible, "joint_finetune: k = " + std::to_string(k) +
                                           " exceeds n = " + std::to_string(data.rows()));
  }
  const std::size_t n = data.rows();

  FineTuneResult result;
  {
    Rng kmeans_rng(derive_seed(ftc.seed, "kmeans"));
    auto km = kmeanspp_init(encode(params, data), k, ftc.kmeans_restarts, kmeans_rng, ftc.alpha);
    result.model = std::move(km.model);
    result.initial_labels = std::move(km.labels);
  }
  ClusterModel& model = result.model;

  auto velocity = params.zeros_like();
  Matrix centroid_velocity(model.centroids.rows(), model.centroids.cols());

  Rng shuffle_rng(derive_seed(ftc.seed, "finetune_shuffle"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, shuffle_rng);
  std::size_t cursor = 0;

  bool have_previous = false;
  double previous_kl = 0.0;

  for (std::size_t it = 0;; ++it) {
    const bool at_cap = it >= ftc.max_iterations;
    if (it % ftc.update_interval == 0 || at_cap) {
      const auto full = forward(params, data);
      AssignmentState state;
      state.q = soft_assign(full.latent, model);
      state.p = target_distribution(state.q);
      state.labels = hard_labels(state.q);

      HistoryEntry h;
      h.iteration = it;
      h.kl = kl_loss(state.p, state.q) / static_cast<double>(n);
      h.recon = recon_loss(data, full.reconstruction, aec.epsilon_weight).l_recon;
      h.delta_label = std::numeric_limits<double>::quiet_NaN();
      bool stop = false;
      if (have_previous) {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
          changed += state.labels[i] != result.state.labels[i] ? 1 : 0;
        }
        h.delta_label = static_cast<double>(changed) / static_cast<double>(n);
        if (h.delta_label < ftc.delta_tol) {
          result.stop_reason = StopReason::delta_label;
          stop = true;
        } else if (std::abs(h.kl - previous_kl) < ftc.kl_tol) {
          result.stop_reason = StopReason::kl_change;
          stop = true;
        }
      }
      result.history.push_back(h);
      result.state = std::move(state);
      previous_kl = h.kl;
      have_previous = true;
      if (stop) break;
    }
    if (at_cap) {
      result.stop_reason = StopReason::max_iterations;
      break;
    }

    if (cursor >= n) {
      shuffle(order, shuffle_rng);
      cursor = 0;
    }
    const std::size_t stop_at = std::min(n, cursor + ftc.batch_size);
    const auto idx = std::span<const std::size_t>(order).subspan(cursor, stop_at - cursor);
    cursor = stop_at;

    const Matrix batch = data.gather_rows(idx);
    const Matrix batch_p = result.state.p.gather_rows(idx);
    const auto fwd = forward(params, batch);
    const Matrix batch_q = soft_assign(fwd.latent, model);
    auto cg = clustering_gradients(fwd.latent, model, batch_p, batch_q);
    // Batch KL enters the objective as a per-point mean, like l_recon.
    const double kl_scale = ftc.gamma / static_cast<double>(batch.rows());
    for (auto& v : cg.grad_z.data()) v *= kl_scale;
    for (auto& v : cg.grad_centroids.data()) v *= kl_scale;

    const auto bwd = backward(params, fwd.cache, batch, aec.epsilon_weight,
                              aec.l2_coefficient, &cg.grad_z);
    auto p_t = params.tensors();
    auto v_t = velocity.tensors();
    const auto g_t = bwd.grads.tensors();
    for (std::size_t t = 0; t < p_t.size(); ++t) {
      momentum_update(p_t[t], v_t[t], g_t[t], ftc.sgd_lr, ftc.sgd_momentum);
    }
    momentum_update(model.centroids.data(), centroid_velocity.data(),
                    cg.grad_centroids.data(), ftc.sgd_lr, ftc.sgd_momentum);
  }

  result.params = std::move(params);
  return result;
}

}  // namespace sdec
