#include "sdec/refine.hpp"

#include <algorithm>
#include <string>

namespace sdec {

void RefineConfig::validate() const {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be >= 0");
  if (max_passes == 0) throw Error(ErrorCode::invalid_argument, "max_passes must be >= 1");
}

namespace {

void check_labels(const Matrix& x, const Labels& labels, std::size_t k) {
  if (labels.size() != x.rows()) {
    throw Error(ErrorCode::shape_mismatch, "refine: label count " + std::to_string(labels.size()) +
                                               " != point count " + std::to_string(x.rows()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      throw Error(ErrorCode::label_range, "refine: label " + std::to_string(labels[i]) +
                                              " at index " + std::to_string(i) +
                                              " outside [0, " + std::to_string(k) + ")");
    }
  }
}

}  // namespace

CentroidSet centroids_from_labels(const Matrix& x, const Labels& labels, std::size_t k) {
  check_labels(x, labels, k);
  CentroidSet out{Matrix(k, x.cols()), std::vector<bool>(k, true)};
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto j = static_cast<std::size_t>(labels[i]);
    auto c = out.centroids.row(j);
    const auto r = x.row(i);
    for (std::size_t d = 0; d < r.size(); ++d) c[d] += r[d];
    ++counts[j];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) continue;
    out.empty[j] = false;
    for (auto& v : out.centroids.row(j)) v /= static_cast<double>(counts[j]);
  }
  return out;
}

RefinePassResult refine_pass(const Matrix& x, const Labels& labels,
                             const CentroidSet& centroids, double lambda) {
  const std::size_t k = centroids.centroids.rows();
  check_labels(x, labels, k);
  if (centroids.centroids.cols() != x.cols() || centroids.empty.size() != k) {
    throw Error(ErrorCode::shape_mismatch, "refine_pass: centroid shape mismatch");
  }

  std::vector<double> centroid_norms(k);
  for (std::size_t j = 0; j < k; ++j) centroid_norms[j] = norm(centroids.centroids.row(j));

  const std::size_t n = x.rows();
  std::vector<std::int32_t> target(n);
  std::vector<double> margins(n, 0.0);
  std::vector<std::size_t> degenerate(n, 0);
  parallel_for(0, n, [&](std::size_t i) {
    const auto xi = x.row(i);
    const double nx = norm(xi);
    auto sim = [&](std::size_t j) {
      if (nx == 0.0 || centroid_norms[j] == 0.0) {
        ++degenerate[i];
        return -1.0;
      }
      return std::clamp(dot(xi, centroids.centroids.row(j)) / (nx * centroid_norms[j]), -1.0, 1.0);
    };
    const auto current = static_cast<std::size_t>(labels[i]);
    const double own = sim(current);
    std::size_t best = current;
    double best_sim = own;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == current || centroids.empty[j]) continue;
      const double s = sim(j);
      if (s > best_sim || (s == best_sim && j < best)) {
        best_sim = s;
        best = j;
      }
    }
    target[i] = static_cast<std::int32_t>(best);
    margins[i] = best_sim - own;
  });

  RefinePassResult r;
  r.labels = labels;
  for (std::size_t i = 0; i < n; ++i) {
    r.degenerate_pairs += degenerate[i];
    if (target[i] != labels[i] && margins[i] > lambda) {
      r.labels[i] = target[i];
      ++r.reassigned;
      r.log.push_back({0, i, labels[i], target[i], margins[i]});
    }
  }
  return r;
}

RefineResult refine(const Matrix& x, const Labels& labels, std::size_t k,
                    const RefineConfig& config) {
  config.validate();
  check_labels(x, labels, k);
  RefineResult out;
  out.labels = labels;
  std::vector<bool> initially_empty = centroids_from_labels(x, labels, k).empty;
  for (std::size_t pass = 0; pass < config.max_passes; ++pass) {
    const auto centroids = centroids_from_labels(x, out.labels, k);
    for (std::size_t j = 0; j < k; ++j) {
      if (centroids.empty[j] && !initially_empty[j]) out.emptied_cluster = true;
    }
    auto step = refine_pass(x, out.labels, centroids, config.lambda);
    ++out.passes;
    out.degenerate_pairs += step.degenerate_pairs;
    for (auto& e : step.log) {
      e.pass = pass;
      out.log.push_back(e);
    }
    out.reassigned += step.reassigned;
    out.labels = std::move(step.labels);
    if (step.reassigned == 0) break;
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (!initially_empty[j] &&
        std::find(out.labels.begin(), out.labels.end(), static_cast<std::int32_t>(j)) == out.labels.end()) {
      out.emptied_cluster = true;
    }
  }
  return out;
}

}  // namespace sdec
