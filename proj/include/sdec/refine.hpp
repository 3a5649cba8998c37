#pragma once

#include <vector>

#include "sdec/numeric.hpp"

namespace sdec {

struct RefineConfig {
  double lambda = 0.2;
  std::size_t max_passes = 10;

  void validate() const;
};

struct CentroidSet {
  Matrix centroids;         // k x d
  std::vector<bool> empty;  // empty[j]: no point carries label j
};

CentroidSet centroids_from_labels(const Matrix& x, const Labels& labels, std::size_t k);

struct Reassignment {
  std::size_t pass = 0;
  std::size_t index = 0;
  std::int32_t old_label = 0;
  std::int32_t new_label = 0;
  double margin = 0.0;  // Sim(x, mu_new) - Sim(x, mu_old)
};

struct RefinePassResult {
  Labels labels;
  std::size_t reassigned = 0;
  std::vector<Reassignment> log;
  // Point/centroid pairs with a zero-norm side; their similarity counted as -1.
  std::size_t degenerate_pairs = 0;
};

// One synchronous pass: every decision uses the given centroids.
RefinePassResult refine_pass(const Matrix& x, const Labels& labels,
                             const CentroidSet& centroids, double lambda);

struct RefineResult {
  Labels labels;
  std::size_t passes = 0;
  std::size_t reassigned = 0;
  std::vector<Reassignment> log;
  std::size_t degenerate_pairs = 0;
  bool emptied_cluster = false;  // some cluster lost all of its points
};

RefineResult refine(const Matrix& x, const Labels& labels, std::size_t k,
                    const RefineConfig& config);

}  // namespace sdec
