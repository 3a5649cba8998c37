#pragma once

#include <stdexcept>
#include <string>

namespace sdec {

enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  degenerate_vector,
  degenerate_row,
  empty_sequence,
  infeasible,
  divergence_infinite,
  io,
  bad_magic,
  truncated,
  unsupported_version,
  corrupt,
  config,
  label_range,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by normalize() for zero / constant rows so callers can report which
// row was offending.
class DegenerateRowError : public Error {
 public:
  DegenerateRowError(std::size_t row, const std::string& what)
      : Error(ErrorCode::degenerate_row,
              what + " at row " + std::to_string(row)),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace sdec
