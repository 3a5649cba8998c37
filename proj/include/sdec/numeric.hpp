#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "sdec/error.hpp"

namespace sdec {

using Labels = std::vector<std::int32_t>;

// Dense row-major matrix of doubles. Rows are the samples (x_i, z_i, mu_j).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  // Copies the listed rows, in order, into a new matrix.
  Matrix gather_rows(std::span<const std::size_t> indices) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T, the layout used for row-batch times (out x in) weights.
Matrix matmul_transposed_b(const Matrix& a, const Matrix& b);
// a^T * b
Matrix matmul_transposed_a(const Matrix& a, const Matrix& b);

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> u);
double squared_distance(std::span<const double> u, std::span<const double> v);

// Clamped to [-1, 1]. Throws ErrorCode::degenerate_vector when either input
// has zero norm.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// xoshiro256** seeded through splitmix64. Constants are the published ones
// (Blackman & Vigna); nothing depends on platform entropy or on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform on [0, n); n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // Marsaglia polar method.
  double gaussian();

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent sub-seed for a named role ("ae_init", "kmeans", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view role);

std::vector<double> gaussian_draw(Rng& rng, std::size_t n, double mean,
                                  double std_dev);

// Fisher-Yates; std::shuffle is implementation-defined across libraries.
void shuffle(std::span<std::size_t> values, Rng& rng);

// Worker threads used by parallel_for. 0 means hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Runs body(i) for i in [begin, end) split into contiguous chunks. Each index
// must write only its own output so results do not depend on the split.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace sdec
