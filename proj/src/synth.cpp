#include "sdec/synth.hpp"

#include <cmath>
#include <numeric>

namespace sdec {

BlobData make_blobs(std::size_t blobs, std::size_t n, std::size_t dim,
                    double separation, std::uint64_t seed) {
  if (blobs == 0 || dim == 0) throw Error(ErrorCode::invalid_argument, "make_blobs: blobs and dim must be >= 1");
  if (n < blobs) throw Error(ErrorCode::infeasible, "make_blobs: fewer points than blobs");
  if (!(separation >= 0.0)) throw Error(ErrorCode::invalid_argument, "make_blobs: separation must be >= 0");
  Rng rng(derive_seed(seed, "synth"));
  const double radius = separation / std::sqrt(2.0);
  Matrix centres(blobs, dim);
  for (std::size_t j = 0; j < blobs; ++j) {
    if (blobs <= dim) {
      centres(j, j) = radius;
      continue;
    }
    auto c = centres.row(j);
    for (auto& v : c) v = rng.gaussian();
    const double len = norm(c);
    for (auto& v : c) v *= radius / len;
  }
  BlobData out{Matrix(n, dim), Labels(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i % blobs;
    out.labels[i] = static_cast<std::int32_t>(j);
    auto r = out.points.row(i);
    const auto c = centres.row(j);
    for (std::size_t k = 0; k < dim; ++k) r[k] = c[k] + rng.gaussian();
  }
  return out;
}

Labels corrupt_labels(const Labels& labels, double fraction, std::size_t k, Rng& rng) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "corrupt_labels: need k >= 2");
  Labels out = labels;
  std::vector<std::size_t> idx(labels.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  shuffle(idx, rng);
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(labels.size())));
  for (std::size_t c = 0; c < count && c < idx.size(); ++c) {
    const std::size_t i = idx[c];
    const auto shift = static_cast<std::int32_t>(1 + rng.uniform_index(k - 1));
    out[i] = static_cast<std::int32_t>((labels[i] + shift) % static_cast<std::int32_t>(k));
  }
  return out;
}

}  // namespace sdec
