#include "qsurr/surrogate.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <vector>

#include "qsurr/errors.hpp"
#include "qsurr/rng.hpp"

using namespace qsurr;

namespace {

Eigen::VectorXd random_input(int d, Rng& rng) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform(0.0, 2.0 * M_PI);
  return x;
}

// Direct O(T^2) inversion c = A^H y / T with A_{j,omega} = exp(-i omega.x_j),
// written without any of the production transform machinery.
Eigen::VectorXcd naive_inversion(const FrequencySet& freq,
                                 const Eigen::VectorXcd& grid_values) {
  const ReconstructionGrid grid = build_grid(freq);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(freq.size());
  for (std::int64_t k = 0; k < freq.size(); ++k) {
    const std::vector<int> omega = freq.frequency_at(k);
    Complex acc(0.0, 0.0);
    for (std::int64_t j = 0; j < grid.size(); ++j) {
      const Eigen::VectorXd x = grid.point(j);
      double phase = 0.0;
      for (int a = 0; a < freq.d(); ++a) phase += omega[a] * x(a);
      acc += std::exp(Complex(0.0, phase)) * grid_values(j);
    }
    c(k) = acc / double(freq.size());
  }
  return c;
}

}  // namespace

TEST_CASE("pinned shot budget values") {
  const SurrogationBudget budget = shot_budget(0.1, 0.01, 25, 1.0);
  CHECK(budget.shots_per_point == 4387);
  CHECK(budget.total_shots == 109675);
  CHECK(budget.grid_size == 25);
  CHECK(inference_budget(0.1, 0.01, 25, 1.0) == 42586);

  // High-precision cross-check of both ceilings.
  const long double raw_shot =
      2.0L / (0.1L * 0.1L) * (std::log(1.0L / 0.01L) + 25.0L * std::log(2.0L));
  CHECK(budget.shots_per_point == static_cast<std::int64_t>(std::ceil(
                                      static_cast<double>(raw_shot))));
  const long double raw_inference =
      2.0L * 25.0L / (0.1L * 0.1L) * std::log(2.0L * 25.0L / 0.01L);
  CHECK(inference_budget(0.1, 0.01, 25, 1.0) ==
        static_cast<std::int64_t>(std::ceil(static_cast<double>(raw_inference))));

  // Degenerate slack: one grid point, near-certain failure allowed.
  CHECK(shot_budget(1.0, 0.999, 1, 1.0).shots_per_point == 2);
}

TEST_CASE("budget monotonicity and scaling") {
  const double raw = shot_budget_raw(0.2, 0.05, 9, 1.0);
  CHECK(shot_budget(0.2, 0.05, 9, 1.0).shots_per_point ==
        static_cast<std::int64_t>(std::ceil(raw)));
  // Halving epsilon exactly quadruples the pre-ceiling count.
  CHECK(shot_budget_raw(0.1, 0.05, 9, 1.0) == doctest::Approx(4.0 * raw));
  // Doubling the observable norm does the same.
  CHECK(shot_budget_raw(0.2, 0.05, 9, 2.0) == doctest::Approx(4.0 * raw));

  CHECK(shot_budget(0.1, 0.05, 9, 1.0).shots_per_point >
        shot_budget(0.2, 0.05, 9, 1.0).shots_per_point);
  CHECK(shot_budget(0.2, 0.01, 9, 1.0).shots_per_point >
        shot_budget(0.2, 0.05, 9, 1.0).shots_per_point);
  CHECK(shot_budget(0.2, 0.05, 25, 1.0).shots_per_point >
        shot_budget(0.2, 0.05, 9, 1.0).shots_per_point);
}

TEST_CASE("certified epsilon inverts the budget") {
  for (double eps : {0.5, 0.1, 0.03}) {
    for (double delta : {0.2, 0.01}) {
      for (std::int64_t T : {std::int64_t{5}, std::int64_t{25}}) {
        const SurrogationBudget budget = shot_budget(eps, delta, T, 1.0);
        const double certified =
            certified_epsilon(budget.shots_per_point, delta, T, 1.0);
        CHECK(certified <= eps);
        CHECK(certified >
              certified_epsilon(2 * budget.shots_per_point, delta, T, 1.0));
      }
    }
  }
}

TEST_CASE("budget argument validation") {
  CHECK_THROWS_AS(shot_budget(0.0, 0.1, 5, 1.0), argument_error);
  CHECK_THROWS_AS(shot_budget(-1.0, 0.1, 5, 1.0), argument_error);
  CHECK_THROWS_AS(shot_budget(0.1, 0.0, 5, 1.0), argument_error);
  CHECK_THROWS_AS(shot_budget(0.1, 1.0, 5, 1.0), argument_error);
  CHECK_THROWS_AS(shot_budget(0.1, 0.1, 0, 1.0), argument_error);
  CHECK_THROWS_AS(shot_budget(0.1, 0.1, 5, 0.0), argument_error);
  // Counts beyond 2^63 fail loudly instead of wrapping.
  CHECK_THROWS_AS(shot_budget(1e-12, 0.5, 1000000, 1.0), resource_error);
}

TEST_CASE("known trigonometric polynomial inverts to its coefficients") {
  // g(x) = 0.3 + 0.5 cos x - 0.2 sin x + 0.1 cos 2x + 0.4 sin 2x, so under
  // the exp(-i omega x) convention c_{+1} = (0.5 - 0.2 i)/2 and
  // c_{+2} = (0.1 + 0.4 i)/2, conjugated on the negative half.
  const FrequencySet freq = FrequencySet::from_maxima({2});
  const ReconstructionGrid grid = build_grid(freq);
  Eigen::VectorXcd values(grid.size());
  for (std::int64_t j = 0; j < grid.size(); ++j) {
    const double x = grid.point(j)(0);
    values(j) = 0.3 + 0.5 * std::cos(x) - 0.2 * std::sin(x) +
                0.1 * std::cos(2 * x) + 0.4 * std::sin(2 * x);
  }
  const Eigen::VectorXcd c = naive_inversion(freq, values);
  CHECK(std::abs(c(0) - Complex(0.05, -0.2)) < 1e-14);   // omega = -2
  CHECK(std::abs(c(1) - Complex(0.25, 0.1)) < 1e-14);    // omega = -1
  CHECK(std::abs(c(2) - Complex(0.3, 0.0)) < 1e-14);     // omega =  0
  CHECK(std::abs(c(3) - Complex(0.25, -0.1)) < 1e-14);   // omega = +1
  CHECK(std::abs(c(4) - Complex(0.05, 0.2)) < 1e-14);    // omega = +2

  // The production evaluator agrees with the closed form off the grid.
  const FourierSurrogate s{freq, c, {}};
  Rng rng(derive_seed(21, "eval-convention"));
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd x = random_input(1, rng);
    const double direct = 0.3 + 0.5 * std::cos(x(0)) - 0.2 * std::sin(x(0)) +
                          0.1 * std::cos(2 * x(0)) + 0.4 * std::sin(2 * x(0));
    CHECK(evaluate_surrogate(s, x) == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("separable transform matches the direct inversion oracle") {
  Rng rng(derive_seed(22, "transform-oracle"));
  for (const auto& [d, L] : std::vector<std::pair<int, int>>{{1, 3}, {2, 2}}) {
    const ModelSpec spec(d, L, 1);
    const Eigen::VectorXd theta = random_parameters(spec, rng.next_u64());
    const FourierSurrogate s = surrogate_exact(spec, theta);

    const ReconstructionGrid grid = build_grid(s.freq);
    Eigen::VectorXcd values(grid.size());
    for (std::int64_t j = 0; j < grid.size(); ++j)
      values(j) = evaluate_exact(spec, theta, grid.point(j));
    const Eigen::VectorXcd oracle = naive_inversion(s.freq, values);
    CHECK((s.coefficients - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exact surrogates reproduce the model off the grid") {
  Rng rng(derive_seed(23, "exactness"));
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 2);
    const int L = 1 + static_cast<int>(rng.next_u64() % 3);
    const int B = 1 + static_cast<int>(rng.next_u64() % 2);
    const ModelSpec spec(d, L, B);
    const Eigen::VectorXd theta = random_parameters(spec, rng.next_u64());
    const FourierSurrogate s = surrogate_exact(spec, theta);

    CHECK(s.provenance.mode == SurrogateMode::exact);
    CHECK(s.provenance.certificate_valid);
    CHECK(s.provenance.model_hash == model_hash(spec, theta));

    for (int probe = 0; probe < 80; ++probe) {
      const Eigen::VectorXd x = random_input(d, rng);
      CHECK(std::abs(evaluate_surrogate(s, x) - evaluate_exact(spec, theta, x)) <
            1e-9);
    }
    // Hermitian symmetry keeps the series real.
    for (std::int64_t k = 0; k < s.freq.size(); ++k) {
      const Complex mirrored = s.coefficients(s.freq.negation_index(k));
      CHECK(std::abs(std::conj(mirrored) - s.coefficients(k)) < 1e-13);
    }
  }
}

TEST_CASE("worker count does not change exact coefficients") {
  const ModelSpec spec(2, 2, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 31);
  const FourierSurrogate one = surrogate_exact(spec, theta, 1);
  const FourierSurrogate many = surrogate_exact(spec, theta, 3);
  CHECK(one.coefficients == many.coefficients);
}

TEST_CASE("shot surrogates are seeded, symmetrized, and certified") {
  const ModelSpec spec(1, 2, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 4);
  const SurrogationBudget budget = shot_budget(0.3, 0.2, 5, 1.0);

  const FourierSurrogate a = surrogate_with_shots(spec, theta, budget, 9);
  const FourierSurrogate b = surrogate_with_shots(spec, theta, budget, 9, 3);
  const FourierSurrogate c = surrogate_with_shots(spec, theta, budget, 10);
  CHECK(a.coefficients == b.coefficients);  // jobs-independent
  CHECK(a.coefficients != c.coefficients);  // seed matters
  CHECK(a.provenance.mode == SurrogateMode::shots);
  CHECK(a.provenance.shots_per_point == budget.shots_per_point);
  CHECK(a.provenance.epsilon == budget.epsilon);
  CHECK(a.provenance.delta == budget.delta);
  CHECK(a.provenance.certificate_valid);

  for (std::int64_t k = 0; k < a.freq.size(); ++k)
    CHECK(a.coefficients(k) ==
          std::conj(a.coefficients(a.freq.negation_index(k))));

  // Short-changing the budget invalidates the certificate.
  SurrogationBudget broke = budget;
  broke.shots_per_point -= 1;
  CHECK_FALSE(
      surrogate_with_shots(spec, theta, broke, 9).provenance.certificate_valid);

  SurrogationBudget wrong_grid = budget;
  wrong_grid.grid_size = 7;
  CHECK_THROWS_AS(surrogate_with_shots(spec, theta, wrong_grid, 9),
                  argument_error);
  SurrogationBudget wrong_norm = budget;
  wrong_norm.observable_norm = 2.0;
  CHECK_THROWS_AS(surrogate_with_shots(spec, theta, wrong_norm, 9),
                  argument_error);
}

TEST_CASE("exact surrogate interpolates the model on the grid") {
  const ModelSpec spec(2, 1, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 12);
  const FourierSurrogate s = surrogate_exact(spec, theta);
  const ReconstructionGrid grid = build_grid(s.freq);
  for (std::int64_t j = 0; j < grid.size(); ++j) {
    const Eigen::VectorXd x = grid.point(j);
    CHECK(std::abs(evaluate_surrogate(s, x) - evaluate_exact(spec, theta, x)) <
          1e-12);
  }
}

TEST_CASE("sup error estimate brackets a known perturbation") {
  const FrequencySet freq = FrequencySet::from_maxima({2});
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(5);
  c(2) = 0.4;
  c(1) = Complex(0.1, 0.05);
  c(3) = Complex(0.1, -0.05);
  const FourierSurrogate g{freq, c, {}};

  const auto same = [&](const Eigen::VectorXd& x) {
    return evaluate_surrogate(g, x);
  };
  CHECK(sup_error_estimate(same, g, 0, 1) < 1e-13);

  const auto shifted = [&](const Eigen::VectorXd& x) {
    return evaluate_surrogate(g, x) + 0.1 * std::cos(3.0 * x(0));
  };
  const double estimate = sup_error_estimate(shifted, g, 0, 1);
  CHECK(estimate <= 0.1 + 1e-12);  // never exceeds the true supremum
  CHECK(estimate > 0.099);         // dense probes get close to it
}

TEST_CASE("surrogate JSON round trip is bit exact") {
  const ModelSpec spec(2, 2, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 77);
  const SurrogationBudget budget =
      shot_budget(0.4, 0.1, FrequencySet::for_model(spec).size(), 1.0);
  const FourierSurrogate s = surrogate_with_shots(spec, theta, budget, 5);

  const std::string text = surrogate_to_json(s);
  const FourierSurrogate back = surrogate_from_json(text);
  CHECK(back.coefficients == s.coefficients);
  CHECK(back.freq.per_feature_max() == s.freq.per_feature_max());
  CHECK(back.provenance.mode == s.provenance.mode);
  CHECK(back.provenance.shots_per_point == s.provenance.shots_per_point);
  CHECK(back.provenance.epsilon == s.provenance.epsilon);
  CHECK(back.provenance.delta == s.provenance.delta);
  CHECK(back.provenance.certificate_valid == s.provenance.certificate_valid);
  CHECK(back.provenance.model_hash == s.provenance.model_hash);
  CHECK(surrogate_to_json(back) == text);

  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "qsurr-roundtrip.json";
  save_surrogate(s, path.string());
  const FourierSurrogate loaded = load_surrogate(path.string());
  CHECK(loaded.coefficients == s.coefficients);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(surrogate_from_json("{}"), parse_error);
  CHECK_THROWS_AS(
      surrogate_from_json(
          "{\"schema_version\":1,\"frequency_set\":{\"d\":1,"
          "\"per_feature_max\":[1]},\"coefficients\":[[0.0,0.0]],"
          "\"provenance\":{}}"),
      parse_error);
}

TEST_CASE("oversized lattices are refused") {
  const ModelSpec spec(8, 3, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 1);
  CHECK_THROWS_AS(surrogate_exact(spec, theta), resource_error);
}
