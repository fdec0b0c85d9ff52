#include "qsurr/model.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

#include "qsurr/errors.hpp"
#include "qsurr/rng.hpp"

using namespace qsurr;

namespace {

Eigen::VectorXd random_input(int d, Rng& rng) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform(0.0, 2.0 * M_PI);
  return x;
}

}  // namespace

TEST_CASE("parameter layout covers exactly (L+1) B d 3 distinct slots") {
  const ModelSpec spec(3, 2, 2);
  CHECK(spec.parameter_count() == 3 * 3 * 2 * 3);
  std::set<Eigen::Index> seen;
  for (int layer = 0; layer <= spec.num_layers(); ++layer)
    for (int block = 1; block <= spec.num_block_layers(); ++block)
      for (int qubit = 0; qubit < spec.d(); ++qubit)
        for (int angle = 0; angle < 3; ++angle) {
          const Eigen::Index idx = spec.theta_index(layer, block, qubit, angle);
          CHECK(idx >= 0);
          CHECK(idx < spec.parameter_count());
          seen.insert(idx);
        }
  CHECK(Eigen::Index(seen.size()) == spec.parameter_count());
}

TEST_CASE("dimension validation") {
  CHECK_THROWS_AS(ModelSpec(0, 1, 1), argument_error);
  CHECK_THROWS_AS(ModelSpec(1, 0, 1), argument_error);
  CHECK_THROWS_AS(ModelSpec(1, 1, 0), argument_error);
  CHECK_THROWS_AS(ModelSpec(25, 1, 1), resource_error);
  CHECK_NOTHROW(ModelSpec(4, 3, 2));
}

TEST_CASE("random parameters are seeded angles in [0, 2pi)") {
  const ModelSpec spec(2, 2, 1);
  const Eigen::VectorXd a = random_parameters(spec, 77);
  const Eigen::VectorXd b = random_parameters(spec, 77);
  const Eigen::VectorXd c = random_parameters(spec, 78);
  REQUIRE(a.size() == spec.parameter_count());
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() < 2.0 * M_PI);
}

TEST_CASE("prepared states stay normalized and expectations stay bounded") {
  Rng rng(derive_seed(10, "model-bounds"));
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int L = 1 + static_cast<int>(rng.next_u64() % 3);
    const int B = 1 + static_cast<int>(rng.next_u64() % 2);
    const ModelSpec spec(d, L, B);
    const Eigen::VectorXd theta = random_parameters(spec, rng.next_u64());
    const Eigen::VectorXd x = random_input(d, rng);
    CHECK(prepare_state(spec, theta, x).norm() ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(evaluate_exact(spec, theta, x)) <=
          spec.observable().operator_norm() + 1e-12);
  }
}

TEST_CASE("parameter-shift gradient matches central finite differences") {
  Rng rng(derive_seed(11, "grad-oracle"));
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 2);
    const int L = 1 + static_cast<int>(rng.next_u64() % 2);
    const ModelSpec spec(d, L, 1);
    Eigen::VectorXd theta = random_parameters(spec, rng.next_u64());
    const Eigen::VectorXd x = random_input(d, rng);
    const Eigen::VectorXd grad = gradient_parameter_shift(spec, theta, x);
    REQUIRE(grad.size() == spec.parameter_count());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double saved = theta(k);
      theta(k) = saved + h;
      const double up = evaluate_exact(spec, theta, x);
      theta(k) = saved - h;
      const double down = evaluate_exact(spec, theta, x);
      theta(k) = saved;
      CHECK(std::abs(grad(k) - (up - down) / (2.0 * h)) < 1e-6);
    }
  }
}

TEST_CASE("shot estimates are deterministic in the seed and concentrate") {
  const ModelSpec spec(1, 1, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 5);
  Eigen::VectorXd x(1);
  x << 1.234;

  const double exact = evaluate_exact(spec, theta, x);
  const double a = estimate_with_shots(spec, theta, x, 20000, 42);
  const double b = estimate_with_shots(spec, theta, x, 20000, 42);
  const double c = estimate_with_shots(spec, theta, x, 20000, 43);
  CHECK(a == b);
  CHECK(a != c);
  // 5 sigma with sigma <= 1/sqrt(20000) ~ 0.0071.
  CHECK(std::abs(a - exact) < 5.0 / std::sqrt(20000.0));

  CHECK_THROWS_AS(estimate_with_shots(spec, theta, x, 0, 1), argument_error);
}

TEST_CASE("model config survives a JSON round trip") {
  const Observable obs({{0.5, "ZI"}, {0.25, "XZ"}});
  const ModelConfig config{ModelSpec(2, 3, 2, obs), 1234};
  const ModelConfig back = model_config_from_json(model_config_to_json(config));
  CHECK(back.spec.d() == 2);
  CHECK(back.spec.num_layers() == 3);
  CHECK(back.spec.num_block_layers() == 2);
  CHECK(back.seed == 1234);
  REQUIRE(back.spec.observable().terms().size() == 2);
  CHECK(back.spec.observable().terms()[0].paulis == "ZI");
  CHECK(back.spec.observable().operator_norm() == doctest::Approx(0.75));
  CHECK(model_config_to_json(back) == model_config_to_json(config));

  CHECK_THROWS_AS(model_config_from_json("{"), parse_error);
  CHECK_THROWS_AS(model_config_from_json("{\"d\": 1}"), parse_error);
}

TEST_CASE("model hash separates parameter vectors") {
  const ModelSpec spec(2, 1, 1);
  const Eigen::VectorXd a = random_parameters(spec, 1);
  Eigen::VectorXd b = a;
  b(0) += 1e-12;
  CHECK(model_hash(spec, a) == model_hash(spec, a));
  CHECK(model_hash(spec, a) != model_hash(spec, b));
}
