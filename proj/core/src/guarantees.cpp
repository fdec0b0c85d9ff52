#include "qsurr/guarantees.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "qsurr/errors.hpp"
#include "qsurr/parallel.hpp"
#include "qsurr/rng.hpp"
#include "qsurr/spectrum.hpp"
#include "qsurr/surrogate.hpp"

namespace qsurr {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Sum of `count` fair +-1 flips via popcounts of 64-bit blocks.
std::int64_t rademacher_sum(Rng& rng, std::int64_t count) {
  std::int64_t ones = 0;
  std::int64_t remaining = count;
  while (remaining >= 64) {
    ones += std::popcount(rng.next_u64());
    remaining -= 64;
  }
  if (remaining > 0) {
    const std::uint64_t mask = (std::uint64_t{1} << remaining) - 1;
    ones += std::popcount(rng.next_u64() & mask);
  }
  return 2 * ones - count;
}

}  // namespace

ConcentrationTable concentration_experiment(
    std::int64_t dimension, std::int64_t samples, double bound,
    const std::vector<double>& alpha_grid, std::int64_t trials,
    std::uint64_t seed, NoiseKind noise, int jobs) {
  if (dimension < 1 || samples < 1 || trials < 1)
    throw argument_error("dimension, samples, and trials must be >= 1");
  if (!(bound > 0.0)) throw argument_error("bound must be positive");

  std::vector<double> l1_norms(static_cast<std::size_t>(trials));
  parallel_for(trials, jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(seed, "concentration-trial",
                          static_cast<std::uint64_t>(t)));
      double l1 = 0.0;
      for (std::int64_t k = 0; k < dimension; ++k) {
        double mean;
        if (noise == NoiseKind::rademacher) {
          mean = bound * static_cast<double>(rademacher_sum(rng, samples)) /
                 static_cast<double>(samples);
        } else {
          double acc = 0.0;
          for (std::int64_t i = 0; i < samples; ++i)
            acc += rng.uniform(-bound, bound);
          mean = acc / static_cast<double>(samples);
        }
        l1 += std::abs(mean);
      }
      l1_norms[static_cast<std::size_t>(t)] = l1;
    }
  });

  ConcentrationTable table;
  table.dimension = dimension;
  table.samples = samples;
  table.bound = bound;
  table.trials = trials;
  table.noise = noise;
  const double t_d = static_cast<double>(dimension);
  const double n_d = static_cast<double>(samples);
  const double b2 = bound * bound;
  for (double alpha : alpha_grid) {
    ConcentrationRow row;
    row.alpha = alpha;
    std::int64_t hits = 0;
    for (double l1 : l1_norms)
      if (l1 >= alpha) ++hits;
    row.empirical_tail =
        static_cast<double>(hits) / static_cast<double>(trials);
    row.mc_standard_error =
        std::sqrt(row.empirical_tail * (1.0 - row.empirical_tail) /
                  static_cast<double>(trials));
    row.l1_bound = std::exp(std::numbers::ln2 * t_d -
                            alpha * alpha * n_d / (2.0 * t_d * b2));
    row.hoeffding_bound =
        std::exp(std::numbers::ln2 * std::log(2.0 * t_d) -
                 alpha * alpha * n_d / (2.0 * t_d * t_d * b2));
    if (row.empirical_tail > row.l1_bound + 3.0 * row.mc_standard_error)
      table.within_bound = false;
    table.rows.push_back(row);
  }
  return table;
}

std::string concentration_table_to_csv(const ConcentrationTable& table) {
  std::string csv =
      "alpha,empirical_tail,mc_standard_error,l1_bound,hoeffding_bound\n";
  for (const auto& row : table.rows) {
    csv += format_double(row.alpha);
    csv += ',' + format_double(row.empirical_tail);
    csv += ',' + format_double(row.mc_standard_error);
    csv += ',' + format_double(row.l1_bound);
    csv += ',' + format_double(row.hoeffding_bound);
    csv += '\n';
  }
  return csv;
}

std::string concentration_table_to_json(const ConcentrationTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows)
    rows.push_back({{"alpha", row.alpha},
                    {"empirical_tail", row.empirical_tail},
                    {"mc_standard_error", row.mc_standard_error},
                    {"l1_bound", row.l1_bound},
                    {"hoeffding_bound", row.hoeffding_bound}});
  nlohmann::json j{
      {"schema_version", 1},
      {"dimension", table.dimension},
      {"samples", table.samples},
      {"bound", table.bound},
      {"trials", table.trials},
      {"noise",
       table.noise == NoiseKind::rademacher ? "rademacher" : "uniform"},
      {"within_bound", table.within_bound},
      {"rows", std::move(rows)},
  };
  return j.dump(2);
}

std::pair<double, double> wilson_interval(std::int64_t successes,
                                          std::int64_t trials) {
  if (trials < 1) throw argument_error("trials must be >= 1");
  if (successes < 0 || successes > trials)
    throw argument_error("successes must lie in [0, trials]");
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TrialSummary recovery_trials(const ModelSpec& spec,
                             const Eigen::VectorXd& theta, double epsilon,
                             double delta, std::int64_t trials,
                             std::uint64_t seed, int jobs) {
  if (trials < 1) throw argument_error("trials must be >= 1");
  const FrequencySet freq = FrequencySet::for_model(spec);
  const SurrogationBudget budget = shot_budget(
      epsilon, delta, freq.size(), spec.observable().operator_norm());
  const FourierSurrogate exact = surrogate_exact(spec, theta, jobs);

  std::vector<char> success(static_cast<std::size_t>(trials), 0);
  std::vector<std::string> chain_failures(static_cast<std::size_t>(trials));
  parallel_for(trials, jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      const FourierSurrogate shot = surrogate_with_shots(
          spec, theta, budget,
          derive_seed(seed, "recovery-trial", static_cast<std::uint64_t>(t)),
          /*jobs=*/1);
      const double sup_error = sup_error_estimate(
          spec, theta, shot,
          derive_seed(seed, "recovery-probe", static_cast<std::uint64_t>(t)),
          /*jobs=*/1);
      success[static_cast<std::size_t>(t)] = sup_error <= epsilon ? 1 : 0;
      const double l1 =
          (exact.coefficients - shot.coefficients).cwiseAbs().sum();
      if (sup_error > l1 + 1e-9)
        chain_failures[static_cast<std::size_t>(t)] =
            "trial " + std::to_string(t) + ": estimated sup error " +
            format_double(sup_error) + " exceeds the l1 coefficient bound " +
            format_double(l1);
    }
  });
  for (const auto& failure : chain_failures)
    if (!failure.empty())
      throw property_violation("sup-error vs l1 bound chain: " + failure);

  TrialSummary summary;
  summary.trials = trials;
  summary.successes =
      std::count(success.begin(), success.end(), char{1});
  summary.empirical_rate = static_cast<double>(summary.successes) /
                           static_cast<double>(trials);
  summary.bound_rate = 1.0 - delta;
  std::tie(summary.wilson_low, summary.wilson_high) =
      wilson_interval(summary.successes, trials);
  const double half_width =
      0.5 * (summary.wilson_high - summary.wilson_low);
  summary.meets_bound =
      summary.empirical_rate >= summary.bound_rate - half_width;
  summary.epsilon = epsilon;
  summary.delta = delta;
  summary.shots_per_point = budget.shots_per_point;
  summary.grid_size = freq.size();
  if (trials == 1)
    summary.warnings.push_back(
        "single trial: the confidence interval is close to [0, 1] and "
        "carries no evidence");
  return summary;
}

std::string trial_summary_to_json(const TrialSummary& summary) {
  nlohmann::json j{
      {"schema_version", 1},
      {"trials", summary.trials},
      {"successes", summary.successes},
      {"empirical_rate", summary.empirical_rate},
      {"bound_rate", summary.bound_rate},
      {"wilson_interval", {summary.wilson_low, summary.wilson_high}},
      {"meets_bound", summary.meets_bound},
      {"epsilon", summary.epsilon},
      {"delta", summary.delta},
      {"shots_per_point", summary.shots_per_point},
      {"grid_size", summary.grid_size},
      {"warnings", summary.warnings},
  };
  return j.dump(2);
}

BudgetComparison budget_comparison(double epsilon, double delta,
                                   const std::vector<std::int64_t>& grid_sizes,
                                   double observable_norm) {
  if (grid_sizes.empty())
    throw argument_error("budget comparison needs at least one grid size");
  BudgetComparison comparison;
  comparison.epsilon = epsilon;
  comparison.delta = delta;
  for (std::int64_t t : grid_sizes) {
    const SurrogationBudget budget =
        shot_budget(epsilon, delta, t, observable_norm);
    BudgetRow row;
    row.grid_size = t;
    row.surrogation_total = budget.total_shots;
    row.inference_total = inference_budget(epsilon, delta, t, observable_norm);
    row.ratio = static_cast<double>(row.surrogation_total) /
                static_cast<double>(row.inference_total);
    row.ratio_per_size = row.ratio / static_cast<double>(t);
    comparison.rows.push_back(row);
  }
  for (std::size_t i = 1; i < comparison.rows.size(); ++i) {
    const auto& prev = comparison.rows[i - 1];
    const auto& cur = comparison.rows[i];
    if (cur.grid_size > prev.grid_size &&
        cur.ratio_per_size >= prev.ratio_per_size)
      comparison.sub_linear_holds = false;
  }
  return comparison;
}

std::string budget_comparison_to_csv(const BudgetComparison& comparison) {
  std::string csv =
      "grid_size,surrogation_total,inference_total,ratio,ratio_per_size\n";
  for (const auto& row : comparison.rows) {
    csv += std::to_string(row.grid_size);
    csv += ',' + std::to_string(row.surrogation_total);
    csv += ',' + std::to_string(row.inference_total);
    csv += ',' + format_double(row.ratio);
    csv += ',' + format_double(row.ratio_per_size);
    csv += '\n';
  }
  return csv;
}

std::string budget_comparison_to_json(const BudgetComparison& comparison) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : comparison.rows)
    rows.push_back({{"grid_size", row.grid_size},
                    {"surrogation_total", row.surrogation_total},
                    {"inference_total", row.inference_total},
                    {"ratio", row.ratio},
                    {"ratio_per_size", row.ratio_per_size}});
  nlohmann::json j{
      {"schema_version", 1},
      {"epsilon", comparison.epsilon},
      {"delta", comparison.delta},
      {"sub_linear_holds", comparison.sub_linear_holds},
      {"rows", std::move(rows)},
  };
  return j.dump(2);
}

}  // namespace qsurr
