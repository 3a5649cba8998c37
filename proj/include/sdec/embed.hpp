#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "sdec/numeric.hpp"

namespace sdec {

// Token-level embeddings of one text: one row per token, mask[i] == false for
// padding.
struct TokenSequence {
  Matrix tokens;
  std::vector<bool> mask;

  static TokenSequence unmasked(Matrix tokens);
};

enum class PoolingStrategy { cls, last, mean, max };
enum class NormalizationMode { unit_norm, layer_norm, feature_standardize, none };

PoolingStrategy parse_pooling(std::string_view name);
std::string_view to_string(PoolingStrategy s);
NormalizationMode parse_normalization(std::string_view name);
std::string_view to_string(NormalizationMode m);

std::vector<double> pool(const TokenSequence& seq, PoolingStrategy strategy);
Matrix pool_all(std::span<const TokenSequence> seqs, PoolingStrategy strategy);

// Stateful normalizer. feature_standardize keeps the per-feature statistics
// from the last fit=true call; the other modes are stateless row transforms.
class Normalizer {
 public:
  explicit Normalizer(NormalizationMode mode) : mode_(mode) {}

  Matrix apply(const Matrix& m, bool fit);

  NormalizationMode mode() const noexcept { return mode_; }
  bool fitted() const noexcept { return !mean_.empty(); }
  const std::vector<double>& feature_mean() const noexcept { return mean_; }
  const std::vector<double>& feature_std() const noexcept { return std_; }

 private:
  NormalizationMode mode_;
  std::vector<double> mean_;
  std::vector<double> std_;
};

// Convenience for the stateless modes; feature_standardize fits on m itself.
Matrix normalize(const Matrix& m, NormalizationMode mode);

}  // namespace sdec
