#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsurr {

/// Invalid argument values (epsilon out of range, zero shots, ...).
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested computation exceeds a configured resource cap.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimization produced a non-finite loss or gradient.
class optimizer_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An asserted property (bound, ordering, determinism) failed to hold; the
/// message names the property.
class property_violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries a 1-based row/column location when known.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& message, std::size_t row = 0,
                       std::size_t column = 0);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace qsurr
