#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsurr/dataset.hpp"
#include "qsurr/optim.hpp"

namespace qsurr {

enum class DatasetKind { synthetic, random_pqc, csv };
enum class BenchModelKind { quantum, surrogate };

struct DatasetSpecConfig {
  DatasetKind kind = DatasetKind::synthetic;
  Eigen::Index n_samples = 300;  // synthetic
  int d = 2;                     // synthetic
  double noise_std = 0.1;        // synthetic
  std::string csv_path;          // csv
  std::string label_column;      // csv
  std::pair<double, double> target_range{0.15, 5.0};  // csv
};

/// One competitor in the benchmark. Quantum entries train a re-uploading
/// model with the dataset's d and (L, B); surrogate entries train the real
/// Fourier coefficients over the full L-lattice.
struct BenchModelConfig {
  std::string name;
  BenchModelKind kind = BenchModelKind::quantum;
  int L = 1;
  int B = 1;  // quantum only
  OptimizerConfig optimizer;
};

enum class SplitPolicy { fixed, per_run_random };

struct BenchConfig {
  DatasetSpecConfig dataset;
  std::vector<BenchModelConfig> models;
  int runs = 50;
  double train_fraction = 0.8;
  SplitPolicy split_policy = SplitPolicy::per_run_random;
  bool standardize_labels = true;
  std::uint64_t seed = 0;
};

std::string bench_config_to_json(const BenchConfig& config);
BenchConfig bench_config_from_json(std::string_view text);
std::uint64_t bench_config_hash(const BenchConfig& config);

/// Outcome of one (run, model) cell. Losses are reported in original label
/// units (standardization is undone by scaling MSE with the square of the
/// training-split label standard deviation).
struct RunResult {
  int run = 0;
  std::string model;
  bool failed = false;
  std::string error;
  std::uint64_t split_seed = 0;
  LossTrace trace;
  double final_train = 0.0;
  double final_val = 0.0;
};

struct AggregateCurve {
  std::vector<double> mean_train;
  std::vector<double> std_train;
  std::vector<double> mean_val;
  std::vector<double> std_val;
  int runs_used = 0;
};

struct BenchmarkReport {
  BenchConfig config;
  std::uint64_t config_hash = 0;
  std::vector<RunResult> results;          // runs x models, run-major
  std::vector<double> best_fit_residuals;  // per run, same label units
  std::map<std::string, AggregateCurve> aggregates;
  bool lower_bound_holds = true;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
};

/// Executes every (run, model) cell with seeds derived from the config
/// seed. Each run draws its split (fresh per run, or the run-0 split under
/// the fixed policy), standardizes labels on the training split, trains
/// every model, and solves the least-squares problem directly on the same
/// split; the direct residual is asserted to lower-bound every quantum
/// model's final training loss (recorded in `violations` when it does
/// not). A failing cell is marked failed and the sweep continues.
BenchmarkReport run_benchmark(const BenchConfig& config, int jobs = 0);

std::string benchmark_report_to_json(const BenchmarkReport& report);

/// Plot-ready table: epoch column, per-model mean/std train and validation
/// curves, and the mean direct-fit residual as a constant column.
std::string aggregate_csv(const BenchmarkReport& report);

}  // namespace qsurr
