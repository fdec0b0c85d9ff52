#include "qsurr/guarantees.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "qsurr/errors.hpp"
#include "qsurr/surrogate.hpp"

using namespace qsurr;

namespace {

// Textbook Wilson score interval, written independently of the library.
std::pair<double, double> wilson_oracle(double successes, double trials) {
  const double z = 1.959963984540054;
  const double p = successes / trials;
  const double z2n = z * z / trials;
  const double center = p + z2n / 2.0;
  const double margin =
      z * std::sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials));
  const double denom = 1.0 + z2n;
  return {std::max(0.0, (center - margin) / denom),
          std::min(1.0, (center + margin) / denom)};
}

}  // namespace

TEST_CASE("wilson interval matches the closed form and clamps") {
  for (const auto& [s, n] : std::vector<std::pair<std::int64_t, std::int64_t>>{
           {50, 50}, {49, 50}, {0, 10}, {10, 10}, {7, 20}}) {
    const auto [low, high] = wilson_interval(s, n);
    const auto [olow, ohigh] = wilson_oracle(double(s), double(n));
    CHECK(low == doctest::Approx(olow).epsilon(1e-12));
    CHECK(high == doctest::Approx(ohigh).epsilon(1e-12));
    CHECK(low >= 0.0);
    CHECK(high <= 1.0);
    const double p = double(s) / double(n);
    CHECK(low <= p + 1e-12);
    CHECK(high >= p - 1e-12);
  }
  CHECK_THROWS_AS(wilson_interval(1, 0), argument_error);
  CHECK_THROWS_AS(wilson_interval(5, 4), argument_error);
}

TEST_CASE("budget comparison table is consistent and sub-linear") {
  const BudgetComparison table = budget_comparison(0.1, 0.01, {5, 25, 125});
  REQUIRE(table.rows.size() == 3);
  for (const BudgetRow& row : table.rows) {
    const SurrogationBudget budget =
        shot_budget(0.1, 0.01, row.grid_size, 1.0);
    CHECK(row.surrogation_total == budget.total_shots);
    CHECK(row.inference_total == inference_budget(0.1, 0.01, row.grid_size, 1.0));
    CHECK(row.ratio == doctest::Approx(double(row.surrogation_total) /
                                       double(row.inference_total)));
    CHECK(row.ratio_per_size ==
          doctest::Approx(row.ratio / double(row.grid_size)));
  }
  CHECK(table.rows[0].ratio_per_size > table.rows[1].ratio_per_size);
  CHECK(table.rows[1].ratio_per_size > table.rows[2].ratio_per_size);
  CHECK(table.sub_linear_holds);

  const std::string csv = budget_comparison_to_csv(table);
  CHECK(csv.find("grid_size") != std::string::npos);
  CHECK(csv.find("109675") != std::string::npos);  // 25 * 4387

  CHECK_THROWS_AS(budget_comparison(0.1, 0.01, {}), argument_error);
}

TEST_CASE("one-dimensional concentration reduces to the scalar tail") {
  const std::vector<double> alphas = {0.0, 0.1, 0.2, 0.4};
  const ConcentrationTable table =
      concentration_experiment(1, 400, 1.0, alphas, 4000, 7);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.within_bound);
  CHECK(table.rows[0].empirical_tail == 1.0);  // every |mean| >= 0
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const double a = alphas[k];
    // T = 1 collapses the vector bound to 2 exp(-a^2 N / 2).
    CHECK(table.rows[k].l1_bound ==
          doctest::Approx(2.0 * std::exp(-a * a * 400.0 / 2.0))
              .epsilon(1e-12));
    CHECK(table.rows[k].empirical_tail <=
          table.rows[k].l1_bound + 3.0 * table.rows[k].mc_standard_error);
    const double p = table.rows[k].empirical_tail;
    CHECK(table.rows[k].mc_standard_error ==
          doctest::Approx(std::sqrt(p * (1.0 - p) / 4000.0)).epsilon(1e-12));
  }
}

TEST_CASE("concentration runs are seeded and worker independent") {
  const std::vector<double> alphas = {0.5, 1.0, 2.0};
  const ConcentrationTable a =
      concentration_experiment(9, 50, 1.0, alphas, 500, 11, NoiseKind::rademacher, 1);
  const ConcentrationTable b =
      concentration_experiment(9, 50, 1.0, alphas, 500, 11, NoiseKind::rademacher, 3);
  const ConcentrationTable c =
      concentration_experiment(9, 50, 1.0, alphas, 500, 12);
  REQUIRE(a.rows.size() == b.rows.size());
  bool identical = true;
  bool different_seed_differs = false;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    identical &= a.rows[k].empirical_tail == b.rows[k].empirical_tail;
    different_seed_differs |=
        a.rows[k].empirical_tail != c.rows[k].empirical_tail;
  }
  CHECK(identical);
  CHECK(different_seed_differs);

  const ConcentrationTable uniform = concentration_experiment(
      9, 50, 1.0, alphas, 500, 11, NoiseKind::uniform);
  CHECK(uniform.within_bound);

  CHECK_THROWS_AS(concentration_experiment(0, 10, 1.0, alphas, 10, 0),
                  argument_error);
  CHECK_THROWS_AS(concentration_experiment(5, 10, 0.0, alphas, 10, 0),
                  argument_error);
}

TEST_CASE("vector bound beats the element-wise bound where it matters") {
  const std::vector<double> alphas = {3.0, 10.0};
  const ConcentrationTable table =
      concentration_experiment(25, 100, 1.0, alphas, 100, 1);
  // exp(ln2 T - a^2 N / (2 T B^2)) against exp(ln2 ln(2T) - a^2 N / (2 T^2 B^2)).
  CHECK(table.rows[0].l1_bound ==
        doctest::Approx(std::exp(std::log(2.0) * 25.0 - 9.0 * 100.0 / 50.0))
            .epsilon(1e-12));
  CHECK(table.rows[0].hoeffding_bound ==
        doctest::Approx(std::exp(std::log(2.0) * std::log(50.0) -
                                 9.0 * 100.0 / (2.0 * 625.0)))
            .epsilon(1e-12));
  CHECK(table.rows[0].l1_bound < table.rows[0].hoeffding_bound);
  CHECK(table.rows[1].l1_bound < table.rows[1].hoeffding_bound);
}

TEST_CASE("recovery trials count certificate successes") {
  const ModelSpec spec(1, 1, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 2);
  const TrialSummary summary = recovery_trials(spec, theta, 0.5, 0.5, 8, 21);
  CHECK(summary.trials == 8);
  CHECK(summary.successes >= 0);
  CHECK(summary.successes <= 8);
  CHECK(summary.empirical_rate ==
        doctest::Approx(double(summary.successes) / 8.0));
  CHECK(summary.bound_rate == 0.5);
  CHECK(summary.epsilon == 0.5);
  CHECK(summary.delta == 0.5);
  CHECK(summary.grid_size == 3);
  CHECK(summary.shots_per_point ==
        shot_budget(0.5, 0.5, 3, 1.0).shots_per_point);
  CHECK(summary.wilson_low <= summary.empirical_rate);
  CHECK(summary.wilson_high >= summary.empirical_rate);
  CHECK(summary.meets_bound);
  CHECK(summary.warnings.empty());

  const TrialSummary again = recovery_trials(spec, theta, 0.5, 0.5, 8, 21);
  CHECK(again.successes == summary.successes);

  const TrialSummary single = recovery_trials(spec, theta, 0.5, 0.5, 1, 21);
  CHECK_FALSE(single.warnings.empty());

  CHECK_THROWS_AS(recovery_trials(spec, theta, 0.5, 0.5, 0, 21),
                  argument_error);
}

TEST_CASE("summary and table serializers emit valid documents") {
  const ModelSpec spec(1, 1, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 2);
  const TrialSummary summary = recovery_trials(spec, theta, 0.5, 0.5, 3, 21);
  const std::string json = trial_summary_to_json(summary);
  CHECK(json.find("\"trials\"") != std::string::npos);
  CHECK(json.find("\"wilson_interval\"") != std::string::npos);

  const ConcentrationTable table =
      concentration_experiment(3, 20, 1.0, {0.5}, 50, 1);
  const std::string csv = concentration_table_to_csv(table);
  CHECK(csv.rfind("alpha,", 0) == 0);
  CHECK(concentration_table_to_json(table).find("\"within_bound\"") !=
        std::string::npos);

  const std::string budget_json =
      budget_comparison_to_json(budget_comparison(0.2, 0.1, {3, 9}));
  CHECK(budget_json.find("\"sub_linear_holds\"") != std::string::npos);
}
