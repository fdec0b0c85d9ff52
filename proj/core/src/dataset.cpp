#include "qsurr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string_view>

#include "qsurr/errors.hpp"
#include "qsurr/io.hpp"
#include "qsurr/model.hpp"
#include "qsurr/parallel.hpp"
#include "qsurr/rng.hpp"

namespace qsurr {

namespace {

// Features map onto [0, 2 pi * kRangeGuard] so the column maximum stays
// strictly below 2 pi.
constexpr double kRangeGuard = 1.0 - 1e-12;

/// Min-max rescale of one column onto [0, hi]; constant columns become all
/// zeros with a zero-scale map and a warning.
AffineMap rescale_column(Eigen::Ref<Eigen::VectorXd> column, double hi,
                         const std::string& what,
                         std::vector<std::string>* warnings) {
  const double lo_v = column.minCoeff();
  const double hi_v = column.maxCoeff();
  AffineMap map;
  if (hi_v - lo_v <= 0.0) {
    map.scale = 0.0;
    map.offset = 0.0;
    column.setZero();
    if (warnings)
      warnings->push_back(what + " is constant; rescaled to all zeros");
    return map;
  }
  map.scale = hi / (hi_v - lo_v);
  map.offset = -lo_v * map.scale;
  for (Eigen::Index i = 0; i < column.size(); ++i)
    column(i) = map.apply(column(i));
  return map;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  // Trim surrounding spaces and an optional CR left by Windows line ends.
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
    cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' ||
                           cell.back() == '\r'))
    cell.remove_suffix(1);
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(),
                                   value);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    throw parse_error("non-numeric value \"" + std::string(cell) + "\"", row,
                      col);
  if (!std::isfinite(value))
    throw parse_error("non-finite value", row, col);
  return value;
}

bool cell_is_numeric(std::string_view cell) {
  try {
    parse_cell(cell, 1, 1);
    return true;
  } catch (const parse_error&) {
    return false;
  }
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Split make_split(Eigen::Index n, double train_fraction, std::uint64_t seed) {
  if (n < 1) throw argument_error("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw argument_error("train fraction must lie in (0, 1]");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(derive_seed(seed, "split"));
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(
        rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }
  auto train_count = static_cast<Eigen::Index>(
      std::llround(train_fraction * static_cast<double>(n)));
  if (train_fraction < 1.0 && n >= 2)
    train_count = std::clamp<Eigen::Index>(train_count, 1, n - 1);
  else
    train_count = std::clamp<Eigen::Index>(train_count, 1, n);
  Split split;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + train_count);
  split.validation.assign(order.begin() + train_count, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& source,
                            const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), source.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = source.row(rows[i]);
  return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& source,
                            const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = source(rows[i]);
  return out;
}

Dataset synthetic_regression(Eigen::Index n_samples, int d, double noise_std,
                             std::uint64_t seed) {
  if (n_samples < 2) throw argument_error("need at least two samples");
  if (d < 1) throw argument_error("need at least one feature");
  if (noise_std < 0.0) throw argument_error("noise level must be >= 0");
  Rng rng(derive_seed(seed, "synthetic-regression"));
  Eigen::VectorXd weights(d);
  for (int j = 0; j < d; ++j) weights(j) = rng.normal();
  Eigen::MatrixXd latent(n_samples, d);
  for (Eigen::Index i = 0; i < n_samples; ++i)
    for (int j = 0; j < d; ++j) latent(i, j) = rng.normal();
  Eigen::VectorXd labels = latent * weights;
  if (noise_std > 0.0)
    for (Eigen::Index i = 0; i < n_samples; ++i)
      labels(i) += noise_std * rng.normal();

  Dataset data;
  data.inputs = std::move(latent);
  data.labels = std::move(labels);
  data.feature_maps.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    data.feature_maps[static_cast<std::size_t>(j)] = rescale_column(
        data.inputs.col(j), 2.0 * std::numbers::pi * kRangeGuard,
        "feature column " + std::to_string(j), &data.warnings);
  return data;
}

Dataset random_pqc_dataset(std::uint64_t seed, int jobs) {
  constexpr Eigen::Index kSamples = 3500;
  constexpr int kFeatures = 4;
  const ModelSpec generator(kFeatures, 2, 2);
  const Eigen::VectorXd theta =
      random_parameters(generator, derive_seed(seed, "pqc-generator"));

  Dataset data;
  data.inputs.resize(kSamples, kFeatures);
  Rng rng(derive_seed(seed, "pqc-inputs"));
  for (Eigen::Index i = 0; i < kSamples; ++i)
    for (int j = 0; j < kFeatures; ++j)
      data.inputs(i, j) = rng.uniform(0.0, 2.0 * std::numbers::pi);

  data.labels.resize(kSamples);
  parallel_for(kSamples, jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i)
      data.labels(i) =
          evaluate_exact(generator, theta, data.inputs.row(i).transpose());
  });
  data.feature_maps.assign(kFeatures, AffineMap{});
  return data;
}

Dataset load_csv_dataset(const std::string& path,
                         const std::string& label_column,
                         std::pair<double, double> target_range) {
  const std::string text = read_file(path);
  std::vector<std::string_view> lines;
  {
    std::string_view rest = text;
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line =
          nl == std::string_view::npos ? rest : rest.substr(0, nl);
      rest = nl == std::string_view::npos ? std::string_view{}
                                          : rest.substr(nl + 1);
      if (!line.empty() && line != "\r") lines.push_back(line);
    }
  }
  if (lines.empty()) throw parse_error("empty CSV file", 1, 1);

  const auto first = split_fields(lines[0]);
  const bool has_header =
      std::any_of(first.begin(), first.end(),
                  [](std::string_view f) { return !cell_is_numeric(f); });
  const std::size_t n_cols = first.size();
  if (n_cols < 2)
    throw parse_error("need a label column and at least one feature", 1, 1);

  // Resolve the label column: by header name first, else by 0-based index.
  std::size_t label_idx = n_cols;
  if (has_header) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      std::string name(first[c]);
      while (!name.empty() && (name.back() == '\r' || name.back() == ' '))
        name.pop_back();
      while (!name.empty() && name.front() == ' ') name.erase(name.begin());
      if (name == label_column) {
        label_idx = c;
        break;
      }
    }
  }
  if (label_idx == n_cols) {
    std::size_t parsed = 0;
    const auto res = std::from_chars(
        label_column.data(), label_column.data() + label_column.size(),
        parsed);
    if (res.ec == std::errc{} &&
        res.ptr == label_column.data() + label_column.size() &&
        parsed < n_cols)
      label_idx = parsed;
    else
      throw parse_error("label column \"" + label_column + "\" not found", 1,
                        1);
  }

  const std::size_t first_data = has_header ? 1 : 0;
  const auto n_rows = static_cast<Eigen::Index>(lines.size() - first_data);
  if (n_rows < 1) throw parse_error("no data rows", lines.size(), 1);

  Dataset data;
  data.inputs.resize(n_rows, static_cast<Eigen::Index>(n_cols - 1));
  data.labels.resize(n_rows);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const std::size_t line_no = first_data + static_cast<std::size_t>(i);
    const auto fields = split_fields(lines[line_no]);
    if (fields.size() != n_cols)
      throw parse_error("expected " + std::to_string(n_cols) +
                            " fields, found " + std::to_string(fields.size()),
                        line_no + 1, 1);
    Eigen::Index feature = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      const double value = parse_cell(fields[c], line_no + 1, c + 1);
      if (c == label_idx)
        data.labels(i) = value;
      else
        data.inputs(i, feature++) = value;
    }
  }

  data.feature_maps.resize(n_cols - 1);
  for (Eigen::Index j = 0; j < data.inputs.cols(); ++j)
    data.feature_maps[static_cast<std::size_t>(j)] = rescale_column(
        data.inputs.col(j), 2.0 * std::numbers::pi * kRangeGuard,
        "feature column " + std::to_string(j), &data.warnings);

  const auto [target_lo, target_hi] = target_range;
  if (!(target_hi > target_lo))
    throw argument_error("target range must be increasing");
  const double label_lo = data.labels.minCoeff();
  const double label_hi = data.labels.maxCoeff();
  if (label_hi - label_lo <= 0.0) {
    data.label_map = AffineMap{0.0, target_lo};
    data.labels.setConstant(target_lo);
    data.warnings.push_back("label column is constant");
  } else {
    data.label_map.scale = (target_hi - target_lo) / (label_hi - label_lo);
    data.label_map.offset = target_lo - label_lo * data.label_map.scale;
    for (Eigen::Index i = 0; i < n_rows; ++i)
      data.labels(i) = data.label_map.apply(data.labels(i));
  }
  return data;
}

}  // namespace qsurr
