#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsurr/model.hpp"

namespace qsurr {

enum class NoiseKind { rademacher, uniform };

/// One row of the tail-probability table at a given threshold alpha.
/// Bounds are stored unclipped; values above 1 are vacuous but kept for a
/// faithful comparison of the closed forms.
struct ConcentrationRow {
  double alpha = 0.0;
  double empirical_tail = 0.0;
  double mc_standard_error = 0.0;
  double l1_bound = 0.0;         // exp(ln2 T - alpha^2 N / (2 T B^2))
  double hoeffding_bound = 0.0;  // exp(ln2 ln(2T) - alpha^2 N / (2 T^2 B^2))
};

struct ConcentrationTable {
  std::int64_t dimension = 0;  // T
  std::int64_t samples = 0;    // N per coordinate
  double bound = 0.0;          // B
  std::int64_t trials = 0;
  NoiseKind noise = NoiseKind::rademacher;
  std::vector<ConcentrationRow> rows;
  /// Empirical tail <= l1 bound + 3 standard errors at every alpha.
  bool within_bound = true;
};

/// Simulates ||eta_hat||_1 for eta_hat a vector of T empirical means of N
/// zero-mean samples bounded by B, and tabulates the empirical tail against
/// the vector and element-wise closed-form bounds. The default +-B coin-flip
/// noise is the extreme-point distribution the bound must absorb; uniform
/// noise on [-B, B] is selectable.
ConcentrationTable concentration_experiment(
    std::int64_t dimension, std::int64_t samples, double bound,
    const std::vector<double>& alpha_grid, std::int64_t trials,
    std::uint64_t seed, NoiseKind noise = NoiseKind::rademacher, int jobs = 0);

std::string concentration_table_to_csv(const ConcentrationTable& table);
std::string concentration_table_to_json(const ConcentrationTable& table);

/// Success statistics over repeated shot-budget reconstructions.
struct TrialSummary {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double empirical_rate = 0.0;
  double bound_rate = 0.0;  // 1 - delta
  double wilson_low = 0.0;
  double wilson_high = 1.0;
  /// empirical_rate >= bound_rate - (wilson half-width).
  bool meets_bound = true;
  std::vector<std::string> warnings;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t shots_per_point = 0;
  std::int64_t grid_size = 0;
};

/// Runs surrogate_with_shots `trials` times at the (epsilon, delta) budget
/// and counts how often the estimated sup error stays within epsilon — the
/// same estimator the certificate uses. Every trial additionally checks
/// the chain sup error <= l1 distance between exact and shot coefficients
/// (a theorem; its failure raises property_violation).
TrialSummary recovery_trials(const ModelSpec& spec,
                             const Eigen::VectorXd& theta, double epsilon,
                             double delta, std::int64_t trials,
                             std::uint64_t seed, int jobs = 0);

std::string trial_summary_to_json(const TrialSummary& summary);

/// Surrogation cost vs direct estimation cost at one grid size.
struct BudgetRow {
  std::int64_t grid_size = 0;
  std::int64_t surrogation_total = 0;
  std::int64_t inference_total = 0;
  double ratio = 0.0;
  double ratio_per_size = 0.0;
};

struct BudgetComparison {
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<BudgetRow> rows;
  /// ratio / T decreases along increasing T (sub-linear overhead).
  bool sub_linear_holds = true;
};

BudgetComparison budget_comparison(double epsilon, double delta,
                                   const std::vector<std::int64_t>& grid_sizes,
                                   double observable_norm = 1.0);

std::string budget_comparison_to_csv(const BudgetComparison& comparison);
std::string budget_comparison_to_json(const BudgetComparison& comparison);

/// 95% Wilson score interval for `successes` out of `trials`.
std::pair<double, double> wilson_interval(std::int64_t successes,
                                          std::int64_t trials);

}  // namespace qsurr
