#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qsurr {

/// v -> scale * v + offset. scale == 0 marks a degenerate (constant) source
/// column whose map cannot be inverted.
struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;

  double apply(double v) const { return scale * v + offset; }
  double invert(double v) const { return (v - offset) / scale; }
};

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> validation;
  std::uint64_t seed = 0;
};

/// Regression dataset with features rescaled into [0, 2pi). The affine maps
/// that produced each feature column and the label column are recorded so
/// original values can be recovered.
struct Dataset {
  Eigen::MatrixXd inputs;  // rows = samples, columns = features
  Eigen::VectorXd labels;
  Split split;
  std::vector<AffineMap> feature_maps;
  AffineMap label_map;
  std::vector<std::string> warnings;

  Eigen::Index n() const { return inputs.rows(); }
  int d() const { return static_cast<int>(inputs.cols()); }
};

/// Disjoint train/validation index sets from a seeded shuffle;
/// train_fraction of the samples (rounded, clamped so neither side is
/// empty for n >= 2) go to training.
Split make_split(Eigen::Index n, double train_fraction, std::uint64_t seed);

/// Rows of `source` selected by `rows`.
Eigen::MatrixXd select_rows(const Eigen::MatrixXd& source,
                            const std::vector<Eigen::Index>& rows);
Eigen::VectorXd select_rows(const Eigen::VectorXd& source,
                            const std::vector<Eigen::Index>& rows);

/// Synthetic linear-regression data: latent standard-normal features, labels
/// a fixed random linear function of them plus Gaussian noise, features then
/// min-max rescaled to [0, 2pi). Defaults (300, 2, 0.1) are deliberately
/// small so dense sup-norm probes stay cheap.
Dataset synthetic_regression(Eigen::Index n_samples = 300, int d = 2,
                             double noise_std = 0.1, std::uint64_t seed = 0);

/// 3500 uniform samples in [0, 2pi)^4 labeled by a seeded random
/// re-uploading model with d = 4, L = 2, B = 2. The label function is
/// band-limited, so any surrogate whose frequency set contains the
/// generator's can fit it to numerical zero.
Dataset random_pqc_dataset(std::uint64_t seed, int jobs = 0);

/// Numeric CSV loader. label_column is a column name (header row) or a
/// 0-based index; remaining columns become features. Features are min-max
/// rescaled to [0, 2pi); labels are affinely mapped onto target_range.
/// Malformed cells raise parse_error with 1-based row/column.
Dataset load_csv_dataset(const std::string& path,
                         const std::string& label_column,
                         std::pair<double, double> target_range);

}  // namespace qsurr
