#include "sdec/embed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sdec {

namespace {

constexpr double kLayerNormEps = 1e-12;

void check_sequence(const TokenSequence& seq) {
  if (seq.mask.size() != seq.tokens.rows()) {
    throw Error(ErrorCode::shape_mismatch, "token mask length != token count");
  }
}

}  // namespace

TokenSequence TokenSequence::unmasked(Matrix tokens) {
  TokenSequence seq{std::move(tokens), {}};
  seq.mask.assign(seq.tokens.rows(), true);
  return seq;
}

PoolingStrategy parse_pooling(std::string_view name) {
  if (name == "cls") return PoolingStrategy::cls;
  if (name == "last") return PoolingStrategy::last;
  if (name == "mean") return PoolingStrategy::mean;
  if (name == "max") return PoolingStrategy::max;
  throw Error(ErrorCode::invalid_argument,
              "unknown pooling strategy '" + std::string(name) + "'");
}

std::string_view to_string(PoolingStrategy s) {
  switch (s) {
    case PoolingStrategy::cls: return "cls";
    case PoolingStrategy::last: return "last";
    case PoolingStrategy::mean: return "mean";
    case PoolingStrategy::max: return "max";
  }
  return "mean";
}

NormalizationMode parse_normalization(std::string_view name) {
  if (name == "unit_norm") return NormalizationMode::unit_norm;
  if (name == "layer_norm") return NormalizationMode::layer_norm;
  if (name == "feature_standardize") return NormalizationMode::feature_standardize;
  if (name == "none") return NormalizationMode::none;
  throw Error(ErrorCode::invalid_argument,
              "unknown normalization mode '" + std::string(name) + "'");
}

std::string_view to_string(NormalizationMode m) {
  switch (m) {
    case NormalizationMode::unit_norm: return "unit_norm";
    case NormalizationMode::layer_norm: return "layer_norm";
    case NormalizationMode::feature_standardize: return "feature_standardize";
    case NormalizationMode::none: return "none";
  }
  return "none";
}

std::vector<double> pool(const TokenSequence& seq, PoolingStrategy strategy) {
  check_sequence(seq);
  const std::size_t d = seq.tokens.cols();
  const auto first = std::find(seq.mask.begin(), seq.mask.end(), true);
  if (first == seq.mask.end()) {
    throw Error(ErrorCode::empty_sequence, "pool: sequence has no unmasked tokens");
  }

  switch (strategy) {
    case PoolingStrategy::cls: {
      const auto r = seq.tokens.row(static_cast<std::size_t>(first - seq.mask.begin()));
      return {r.begin(), r.end()};
    }
    case PoolingStrategy::last: {
      const auto last = std::find(seq.mask.rbegin(), seq.mask.rend(), true);
      const auto idx = static_cast<std::size_t>(seq.mask.rend() - last) - 1;
      const auto r = seq.tokens.row(idx);
      return {r.begin(), r.end()};
    }
    case PoolingStrategy::mean: {
      std::vector<double> out(d, 0.0);
      std::size_t count = 0;
      for (std::size_t t = 0; t < seq.tokens.rows(); ++t) {
        if (!seq.mask[t]) continue;
        const auto r = seq.tokens.row(t);
        for (std::size_t k = 0; k < d; ++k) out[k] += r[k];
        ++count;
      }
      for (auto& v : out) v /= static_cast<double>(count);
      return out;
    }
    case PoolingStrategy::max: {
      std::vector<double> out(d, -INFINITY);
      for (std::size_t t = 0; t < seq.tokens.rows(); ++t) {
        if (!seq.mask[t]) continue;
        const auto r = seq.tokens.row(t);
        for (std::size_t k = 0; k < d; ++k) out[k] = std::max(out[k], r[k]);
      }
      return out;
    }
  }
  throw Error(ErrorCode::invalid_argument, "pool: bad strategy");
}

Matrix pool_all(std::span<const TokenSequence> seqs, PoolingStrategy strategy) {
  if (seqs.empty()) return {};
  const std::size_t d = seqs.front().tokens.cols();
  Matrix out(seqs.size(), d);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i].tokens.cols() != d) {
      throw Error(ErrorCode::shape_mismatch,
                  "pool_all: sequence " + std::to_string(i) + " has dim " +
                      std::to_string(seqs[i].tokens.cols()));
    }
    const auto v = pool(seqs[i], strategy);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

Matrix Normalizer::apply(const Matrix& m, bool fit) {
  Matrix out = m;
  const std::size_t d = m.cols();
  switch (mode_) {
    case NormalizationMode::none:
      return out;

    case NormalizationMode::unit_norm:
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const double n = norm(m.row(i));
        if (n == 0.0) throw DegenerateRowError(i, "unit_norm: zero row");
        for (auto& v : out.row(i)) v /= n;
      }
      return out;

    case NormalizationMode::layer_norm:
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        double mean = 0.0;
        for (const double v : r) mean += v;
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (const double v : r) var += (v - mean) * (v - mean);
        var /= static_cast<double>(d);
        if (var == 0.0) throw DegenerateRowError(i, "layer_norm: constant row");
        const double s = std::sqrt(var + kLayerNormEps);
        auto o = out.row(i);
        for (std::size_t k = 0; k < d; ++k) o[k] = (r[k] - mean) / s;
      }
      return out;

    case NormalizationMode::feature_standardize: {
      if (fit) {
        if (m.rows() == 0) {
          throw Error(ErrorCode::invalid_argument, "feature_standardize: cannot fit on 0 rows");
        }
        mean_.assign(d, 0.0);
        std_.assign(d, 0.0);
        for (std::size_t i = 0; i < m.rows(); ++i) {
          const auto r = m.row(i);
          for (std::size_t k = 0; k < d; ++k) mean_[k] += r[k];
        }
        for (auto& v : mean_) v /= static_cast<double>(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
          const auto r = m.row(i);
          for (std::size_t k = 0; k < d; ++k) {
            std_[k] += (r[k] - mean_[k]) * (r[k] - mean_[k]);
          }
        }
        for (auto& v : std_) {
          v = std::sqrt(v / static_cast<double>(m.rows()));
          if (v == 0.0) v = 1.0;
        }
      } else if (!fitted()) {
        throw Error(ErrorCode::invalid_argument,
                    "feature_standardize: apply without fitted statistics");
      }
      if (mean_.size() != d) {
        throw Error(ErrorCode::shape_mismatch, "feature_standardize: fitted on a different width");
      }
      for (std::size_t i = 0; i < m.rows(); ++i) {
        auto o = out.row(i);
        for (std::size_t k = 0; k < d; ++k) o[k] = (o[k] - mean_[k]) / std_[k];
      }
      return out;
    }
  }
  return out;
}

Matrix normalize(const Matrix& m, NormalizationMode mode) {
  Normalizer n(mode);
  return n.apply(m, true);
}

}  // namespace sdec
