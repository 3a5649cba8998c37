#pragma once

#include <cstdint>
#include <vector>

#include "sdec/numeric.hpp"

namespace sdec {

struct ContingencyTable {
  std::size_t true_classes = 0;  // rows
  std::size_t pred_clusters = 0; // cols
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;

  std::int64_t at(std::size_t t, std::size_t p) const { return counts[t * pred_clusters + p]; }
  std::vector<std::int64_t> row_sums() const;
  std::vector<std::int64_t> col_sums() const;
};

// Label values are used directly as indices, so unused values give zero
// rows/columns. Negative labels are rejected.
ContingencyTable contingency(const Labels& y_true, const Labels& y_pred);

// Minimum-cost perfect matching on a square cost matrix (row-major, size
// n x n). Returns assignment[row] = column.
std::vector<std::size_t> hungarian(std::span<const std::int64_t> cost, std::size_t n);

struct AccuracyResult {
  double acc = 0.0;
  // mapping[cluster] = matched true label, -1 if the cluster is unmatched.
  std::vector<std::int32_t> mapping;
};

AccuracyResult accuracy(const Labels& y_true, const Labels& y_pred);
double nmi(const Labels& y_true, const Labels& y_pred);
double ari(const Labels& y_true, const Labels& y_pred);

struct MetricsReport {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  std::vector<std::int32_t> mapping;
};

MetricsReport evaluate(const Labels& y_true, const Labels& y_pred);

}  // namespace sdec
