#include "sdec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sdec {

std::vector<std::int64_t> ContingencyTable::row_sums() const {
  std::vector<std::int64_t> s(true_classes, 0);
  for (std::size_t t = 0; t < true_classes; ++t) {
    for (std::size_t p = 0; p < pred_clusters; ++p) s[t] += at(t, p);
  }
  return s;
}

std::vector<std::int64_t> ContingencyTable::col_sums() const {
  std::vector<std::int64_t> s(pred_clusters, 0);
  for (std::size_t t = 0; t < true_classes; ++t) {
    for (std::size_t p = 0; p < pred_clusters; ++p) s[p] += at(t, p);
  }
  return s;
}

ContingencyTable contingency(const Labels& y_true, const Labels& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::shape_mismatch, "contingency: label vectors differ in length (" +
                                               std::to_string(y_true.size()) + " vs " +
                                               std::to_string(y_pred.size()) + ")");
  }
  if (y_true.empty()) throw Error(ErrorCode::invalid_argument, "contingency: empty labelings");
  auto check = [](const Labels& l, const char* which) {
    const auto m = *std::min_element(l.begin(), l.end());
    if (m < 0) throw Error(ErrorCode::label_range, std::string(which) + " labels contain a negative value");
    return static_cast<std::size_t>(*std::max_element(l.begin(), l.end())) + 1;
  };
  ContingencyTable t;
  t.true_classes = check(y_true, "true");
  t.pred_clusters = check(y_pred, "predicted");
  t.counts.assign(t.true_classes * t.pred_clusters, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++t.counts[static_cast<std::size_t>(y_true[i]) * t.pred_clusters +
               static_cast<std::size_t>(y_pred[i])];
  }
  t.n = static_cast<std::int64_t>(y_true.size());
  return t;
}

// Shortest augmenting path with row/column potentials, O(n^3).
std::vector<std::size_t> hungarian(std::span<const std::int64_t> cost, std::size_t n) {
  if (cost.size() != n * n) throw Error(ErrorCode::shape_mismatch, "hungarian: cost is not n x n");
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based internally; index 0 is the virtual source column.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match_col[0] = row;
    std::size_t col0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r0 = match_col[col0];
      std::int64_t delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const std::int64_t cur = cost[(r0 - 1) * n + (c - 1)] - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match_col[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match_col[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match_col[col0] = match_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t c = 1; c <= n; ++c) {
    if (match_col[c] != 0) assignment[match_col[c] - 1] = c - 1;
  }
  return assignment;
}

AccuracyResult accuracy(const Labels& y_true, const Labels& y_pred) {
  const auto t = contingency(y_true, y_pred);
  const std::size_t m = std::max(t.true_classes, t.pred_clusters);
  std::int64_t max_count = 0;
  for (const auto c : t.counts) max_count = std::max(max_count, c);
  // Rows are predicted clusters, columns true labels; padding cells count 0.
  std::vector<std::int64_t> cost(m * m, max_count);
  for (std::size_t p = 0; p < t.pred_clusters; ++p) {
    for (std::size_t c = 0; c < t.true_classes; ++c) cost[p * m + c] = max_count - t.at(c, p);
  }
  const auto assign = hungarian(cost, m);
  AccuracyResult r;
  r.mapping.assign(t.pred_clusters, -1);
  std::int64_t matched = 0;
  for (std::size_t p = 0; p < t.pred_clusters; ++p) {
    const std::size_t c = assign[p];
    if (c < t.true_classes) {
      r.mapping[p] = static_cast<std::int32_t>(c);
      matched += t.at(c, p);
    }
  }
  r.acc = static_cast<double>(matched) / static_cast<double>(t.n);
  return r;
}

namespace {

double entropy(const std::vector<std::int64_t>& sums, double n) {
  double h = 0.0;
  for (const auto s : sums) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / n;
    h -= p * std::log(p);
  }
  return h;
}

double choose2(std::int64_t v) { return static_cast<double>(v * (v - 1) / 2); }

}  // namespace

double nmi(const Labels& y_true, const Labels& y_pred) {
  const auto t = contingency(y_true, y_pred);
  const double n = static_cast<double>(t.n);
  const auto a = t.row_sums();
  const auto b = t.col_sums();
  const double hy = entropy(a, n);
  const double hc = entropy(b, n);
  if (hy + hc == 0.0) return 1.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < t.true_classes; ++i) {
    for (std::size_t j = 0; j < t.pred_clusters; ++j) {
      const auto c = t.at(i, j);
      if (c == 0) continue;
      const double pij = static_cast<double>(c) / n;
      mi += pij * std::log(n * static_cast<double>(c) /
                           (static_cast<double>(a[i]) * static_cast<double>(b[j])));
    }
  }
  return std::clamp(2.0 * mi / (hy + hc), 0.0, 1.0);
}

double ari(const Labels& y_true, const Labels& y_pred) {
  if (y_true.size() < 2) throw Error(ErrorCode::invalid_argument, "ari: needs at least 2 points");
  const auto t = contingency(y_true, y_pred);
  // Pair counts are accumulated in integers so ari(y, c) == ari(c, y) exactly.
  std::int64_t index = 0;
  for (const auto c : t.counts) index += c * (c - 1) / 2;
  std::int64_t sum_a = 0;
  for (const auto s : t.row_sums()) sum_a += s * (s - 1) / 2;
  std::int64_t sum_b = 0;
  for (const auto s : t.col_sums()) sum_b += s * (s - 1) / 2;
  const double total = choose2(t.n);
  const double expected = static_cast<double>(sum_a) * static_cast<double>(sum_b) / total;
  const double max_index = 0.5 * static_cast<double>(sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (static_cast<double>(index) - expected) / denom;
}

MetricsReport evaluate(const Labels& y_true, const Labels& y_pred) {
  auto acc = accuracy(y_true, y_pred);
  MetricsReport r;
  r.acc = acc.acc;
  r.mapping = std::move(acc.mapping);
  r.nmi = nmi(y_true, y_pred);
  r.ari = y_true.size() >= 2 ? ari(y_true, y_pred) : 1.0;
  return r;
}

}  // namespace sdec
