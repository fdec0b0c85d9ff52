#include "qsurr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include <json.hpp>

#include "qsurr/errors.hpp"

namespace qsurr {

FrequencySet::FrequencySet(std::vector<int> per_feature_max)
    : per_feature_max_(std::move(per_feature_max)) {
  if (per_feature_max_.empty())
    throw argument_error("frequency set needs at least one feature");
  strides_.assign(per_feature_max_.size(), 1);
  size_ = 1;
  for (int i = static_cast<int>(per_feature_max_.size()) - 1; i >= 0; --i) {
    const int w = per_feature_max_[static_cast<std::size_t>(i)];
    if (w < 0) throw argument_error("per-feature maximum must be >= 0");
    const std::int64_t t = 2 * std::int64_t(w) + 1;
    strides_[static_cast<std::size_t>(i)] = size_;
    if (size_ > (std::int64_t(1) << 62) / t)
      throw resource_error("frequency lattice size overflows");
    size_ *= t;
  }
}

FrequencySet FrequencySet::from_maxima(std::vector<int> per_feature_max) {
  return FrequencySet(std::move(per_feature_max));
}

FrequencySet FrequencySet::for_model(const ModelSpec& spec) {
  // Eigenvalues of the encoding generator X/2 are +-1/2; store them doubled
  // so everything stays in exact integer arithmetic. A feature passes
  // through one encoding gate per layer.
  const std::vector<int> doubled_eigenvalues{-1, 1};
  std::set<int> sums{0};
  for (int layer = 0; layer < spec.num_layers(); ++layer) {
    std::set<int> next;
    for (int s : sums)
      for (int e : doubled_eigenvalues) next.insert(s + e);
    sums = std::move(next);
  }
  int w_doubled = 0;
  for (int a : sums)
    for (int b : sums) w_doubled = std::max(w_doubled, std::abs(a - b));
  // Doubled differences are even; halve back to integer frequencies.
  const int w = w_doubled / 2;
  return FrequencySet(std::vector<int>(static_cast<std::size_t>(spec.d()), w));
}

std::vector<std::int64_t> FrequencySet::grid_sizes() const {
  std::vector<std::int64_t> sizes;
  sizes.reserve(per_feature_max_.size());
  for (int w : per_feature_max_) sizes.push_back(2 * std::int64_t(w) + 1);
  return sizes;
}

std::vector<int> FrequencySet::frequency_at(std::int64_t index) const {
  std::vector<int> omega(per_feature_max_.size());
  frequency_at(index, omega.data());
  return omega;
}

void FrequencySet::frequency_at(std::int64_t index, int* out) const {
  if (index < 0 || index >= size_)
    throw std::out_of_range("frequency index out of range");
  for (std::size_t i = 0; i < per_feature_max_.size(); ++i) {
    const std::int64_t t = 2 * std::int64_t(per_feature_max_[i]) + 1;
    const std::int64_t digit = (index / strides_[i]) % t;
    out[i] = static_cast<int>(digit) - per_feature_max_[i];
  }
}

std::int64_t FrequencySet::index_of(const std::vector<int>& omega) const {
  if (omega.size() != per_feature_max_.size())
    throw argument_error("frequency vector has wrong dimension");
  std::int64_t index = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const int w = per_feature_max_[i];
    if (omega[i] < -w || omega[i] > w)
      throw std::out_of_range("frequency outside the lattice");
    index += (std::int64_t(omega[i]) + w) * strides_[i];
  }
  return index;
}

std::string frequency_set_to_json(const FrequencySet& freq) {
  nlohmann::json j{{"d", freq.d()},
                   {"per_feature_max", freq.per_feature_max()}};
  return j.dump(2);
}

FrequencySet frequency_set_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid frequency set JSON: ") + e.what());
  }
  try {
    auto maxima = j.at("per_feature_max").get<std::vector<int>>();
    if (j.contains("d") &&
        j.at("d").get<int>() != static_cast<int>(maxima.size()))
      throw parse_error("d does not match per_feature_max length");
    return FrequencySet::from_maxima(std::move(maxima));
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid frequency set JSON: ") + e.what());
  }
}

ReconstructionGrid::ReconstructionGrid(const FrequencySet& freq,
                                       std::int64_t cap) {
  if (freq.size() > cap)
    throw resource_error("grid of " + std::to_string(freq.size()) +
                         " points exceeds the cap of " + std::to_string(cap));
  sizes_ = freq.grid_sizes();
  strides_.assign(sizes_.size(), 1);
  size_ = 1;
  for (int i = static_cast<int>(sizes_.size()) - 1; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] = size_;
    size_ *= sizes_[static_cast<std::size_t>(i)];
  }
}

Eigen::VectorXd ReconstructionGrid::point(std::int64_t index) const {
  if (index < 0 || index >= size_)
    throw std::out_of_range("grid index out of range");
  Eigen::VectorXd x(static_cast<Eigen::Index>(sizes_.size()));
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    const std::int64_t j = (index / strides_[i]) % sizes_[i];
    x(static_cast<Eigen::Index>(i)) =
        2.0 * std::numbers::pi * static_cast<double>(j) /
        static_cast<double>(sizes_[i]);
  }
  return x;
}

ReconstructionGrid build_grid(const FrequencySet& freq, std::int64_t cap) {
  return ReconstructionGrid(freq, cap);
}

}  // namespace qsurr
