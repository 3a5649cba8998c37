#pragma once

#include <cstdint>

#include "sdec/numeric.hpp"

namespace sdec {

struct BlobData {
  Matrix points;
  Labels labels;
};

// Isotropic unit-variance Gaussian blobs whose centres are pairwise
// `separation` apart: centre j sits at (separation / sqrt 2) * e_j when
// blobs <= dim, otherwise on random directions at that radius. Point i
// belongs to blob i % blobs.
BlobData make_blobs(std::size_t blobs, std::size_t n, std::size_t dim,
                    double separation, std::uint64_t seed);

// Relabels round(fraction * n) distinct points to a different label in [0, k).
Labels corrupt_labels(const Labels& labels, double fraction, std::size_t k, Rng& rng);

}  // namespace sdec
