#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qsurr/model.hpp"

namespace qsurr {

/// Largest grid the library will materialize or sample by default; the size
/// is exponential in d, so fail loudly instead of thrashing.
inline constexpr std::int64_t kDefaultGridCap = 1'000'000;

/// Integer frequency lattice Omega = prod_i {-w_i, ..., +w_i} stored
/// implicitly via the per-feature maxima w_i. Enumeration is lexicographic
/// with feature 0 most significant and each coordinate ascending from -w_i
/// to +w_i; this canonical order indexes coefficients everywhere.
class FrequencySet {
 public:
  static FrequencySet from_maxima(std::vector<int> per_feature_max);

  /// Accessible frequencies of a re-uploading model, found by enumerating
  /// the differences of eigenvalue sums of the per-feature encoding
  /// generators (X/2 per encoding layer). For the RX-per-feature encoding
  /// this gives w_i = L for every feature.
  static FrequencySet for_model(const ModelSpec& spec);

  int d() const noexcept { return static_cast<int>(per_feature_max_.size()); }
  const std::vector<int>& per_feature_max() const noexcept {
    return per_feature_max_;
  }

  /// T_i = 2 w_i + 1, always odd.
  std::vector<std::int64_t> grid_sizes() const;

  /// T = prod_i T_i = |Omega|.
  std::int64_t size() const noexcept { return size_; }

  /// Frequency vector at a canonical index.
  std::vector<int> frequency_at(std::int64_t index) const;
  void frequency_at(std::int64_t index, int* out) const;

  /// Canonical index of a frequency vector.
  std::int64_t index_of(const std::vector<int>& omega) const;

  /// Index of -omega. The enumeration makes this T - 1 - index.
  std::int64_t negation_index(std::int64_t index) const noexcept {
    return size_ - 1 - index;
  }

  /// Index of the zero frequency, (T - 1) / 2.
  std::int64_t zero_index() const noexcept { return (size_ - 1) / 2; }

 private:
  explicit FrequencySet(std::vector<int> per_feature_max);

  std::vector<int> per_feature_max_;
  std::vector<std::int64_t> strides_;
  std::int64_t size_ = 1;
};

std::string frequency_set_to_json(const FrequencySet& freq);
FrequencySet frequency_set_from_json(std::string_view text);

/// Product of per-feature equispaced grids x_i(j) = 2 pi j / T_i on
/// [0, 2pi), enumerated row-major with feature 0 slowest (same order as the
/// frequency lattice). Points are generated on demand.
class ReconstructionGrid {
 public:
  ReconstructionGrid(const FrequencySet& freq, std::int64_t cap);

  int d() const noexcept { return static_cast<int>(sizes_.size()); }
  std::int64_t size() const noexcept { return size_; }
  const std::vector<std::int64_t>& grid_sizes() const noexcept {
    return sizes_;
  }

  Eigen::VectorXd point(std::int64_t index) const;

 private:
  std::vector<std::int64_t> sizes_;
  std::vector<std::int64_t> strides_;
  std::int64_t size_ = 1;
};

ReconstructionGrid build_grid(const FrequencySet& freq,
                              std::int64_t cap = kDefaultGridCap);

}  // namespace qsurr
