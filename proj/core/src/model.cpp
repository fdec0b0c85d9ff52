#include "qsurr/model.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsurr/errors.hpp"
#include "qsurr/rng.hpp"

namespace qsurr {

namespace {

void validate_dims(int d, int L, int B);

// Validated before the observable is built so bad dimensions surface as
// argument/resource errors rather than an index failure inside the gate code.
Observable default_observable(int d) {
  validate_dims(d, 1, 1);
  return Observable::z_on_qubit(0, d);
}

void validate_dims(int d, int L, int B) {
  if (d < 1) throw argument_error("model needs at least one feature");
  if (L < 1) throw argument_error("model needs at least one encoding layer");
  if (B < 1) throw argument_error("model needs at least one block layer");
  if (d > kMaxQubits)
    throw resource_error("d = " + std::to_string(d) +
                         " exceeds the qubit cap of " +
                         std::to_string(kMaxQubits));
}

}  // namespace

ModelSpec::ModelSpec(int d, int L, int B)
    : ModelSpec(d, L, B, default_observable(d)) {}

ModelSpec::ModelSpec(int d, int L, int B, Observable observable)
    : d_(d), L_(L), B_(B), observable_(std::move(observable)) {
  validate_dims(d, L, B);
  if (observable_.n_qubits() != d_)
    throw argument_error("observable width does not match feature count");
}

Eigen::Index ModelSpec::parameter_count() const noexcept {
  return Eigen::Index(L_ + 1) * B_ * d_ * 3;
}

Eigen::Index ModelSpec::theta_index(int layer, int block_layer, int qubit,
                                    int angle) const {
  if (layer < 0 || layer > L_) throw std::out_of_range("layer out of range");
  if (block_layer < 1 || block_layer > B_)
    throw std::out_of_range("block layer out of range");
  if (qubit < 0 || qubit >= d_) throw std::out_of_range("qubit out of range");
  if (angle < 0 || angle > 2) throw std::out_of_range("angle out of range");
  return ((Eigen::Index(layer) * B_ + (block_layer - 1)) * d_ + qubit) * 3 +
         angle;
}

Eigen::VectorXd random_parameters(const ModelSpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "model-parameters"));
  Eigen::VectorXd theta(spec.parameter_count());
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    theta(i) = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return theta;
}

namespace {

void check_shapes(const ModelSpec& spec, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& x) {
  if (theta.size() != spec.parameter_count())
    throw argument_error("theta has length " + std::to_string(theta.size()) +
                         ", expected " +
                         std::to_string(spec.parameter_count()));
  if (x.size() != spec.d())
    throw argument_error("input has dimension " + std::to_string(x.size()) +
                         ", expected " + std::to_string(spec.d()));
}

// One trainable block W^(layer): B block layers of per-qubit rotations
// followed by a CNOT ring; block layer b entangles qubit i with
// (i + b) mod n and self-loops are skipped.
void apply_trainable_block(StateVector& state, const ModelSpec& spec,
                           const Eigen::VectorXd& theta, int layer) {
  const int n = spec.n_qubits();
  for (int b = 1; b <= spec.num_block_layers(); ++b) {
    for (int q = 0; q < n; ++q) {
      const double a0 = theta(spec.theta_index(layer, b, q, 0));
      const double a1 = theta(spec.theta_index(layer, b, q, 1));
      const double a2 = theta(spec.theta_index(layer, b, q, 2));
      apply_gate_in_place(state, Gate::rot(a0, a1, a2, q));
    }
    for (int q = 0; q < n; ++q) {
      const int t = (q + b) % n;
      if (t == q) continue;
      apply_gate_in_place(state, Gate::cnot(q, t));
    }
  }
}

void apply_encoding(StateVector& state, const Eigen::VectorXd& x) {
  for (int q = 0; q < x.size(); ++q)
    apply_gate_in_place(state, Gate::rx(x(q), q));
}

}  // namespace

StateVector prepare_state(const ModelSpec& spec, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& x) {
  check_shapes(spec, theta, x);
  StateVector state = StateVector::zero_state(spec.n_qubits());
  apply_trainable_block(state, spec, theta, 0);
  for (int layer = 1; layer <= spec.num_layers(); ++layer) {
    apply_encoding(state, x);
    apply_trainable_block(state, spec, theta, layer);
  }
  return state;
}

double evaluate_exact(const ModelSpec& spec, const Eigen::VectorXd& theta,
                      const Eigen::VectorXd& x) {
  const StateVector state = prepare_state(spec, theta, x);
  return expectation(state, spec.observable());
}

double estimate_with_shots(const ModelSpec& spec, const Eigen::VectorXd& theta,
                           const Eigen::VectorXd& x, std::int64_t shots,
                           std::uint64_t rng_seed) {
  if (shots <= 0) throw argument_error("shots must be positive");
  const StateVector state = prepare_state(spec, theta, x);
  Rng rng(rng_seed);
  double value = 0.0;
  for (const auto& term : spec.observable().terms()) {
    const double p_plus = (1.0 + pauli_expectation(state, term.paulis)) / 2.0;
    std::int64_t plus = 0;
    for (std::int64_t s = 0; s < shots; ++s)
      if (rng.bernoulli(p_plus)) ++plus;
    const double mean =
        static_cast<double>(2 * plus - shots) / static_cast<double>(shots);
    value += term.coefficient * mean;
  }
  return value;
}

Eigen::VectorXd gradient_parameter_shift(const ModelSpec& spec,
                                         const Eigen::VectorXd& theta,
                                         const Eigen::VectorXd& x) {
  check_shapes(spec, theta, x);
  constexpr double half_pi = std::numbers::pi / 2.0;
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd shifted = theta;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    shifted(k) = theta(k) + half_pi;
    const double plus = evaluate_exact(spec, shifted, x);
    shifted(k) = theta(k) - half_pi;
    const double minus = evaluate_exact(spec, shifted, x);
    shifted(k) = theta(k);
    grad(k) = (plus - minus) / 2.0;
  }
  return grad;
}

namespace {

nlohmann::json observable_to_json(const Observable& obs) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : obs.terms())
    terms.push_back({{"coefficient", t.coefficient}, {"paulis", t.paulis}});
  return {{"terms", terms}};
}

Observable observable_from_json(const nlohmann::json& j, int d) {
  if (j.is_null()) return Observable::z_on_qubit(0, d);
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    terms.push_back(PauliTerm{t.at("coefficient").get<double>(),
                              t.at("paulis").get<std::string>()});
  }
  return Observable(std::move(terms));
}

}  // namespace

std::string model_config_to_json(const ModelConfig& config) {
  nlohmann::json j{{"schema_version", 1},
                   {"d", config.spec.d()},
                   {"L", config.spec.num_layers()},
                   {"B", config.spec.num_block_layers()},
                   {"observable", observable_to_json(config.spec.observable())},
                   {"seed", config.seed}};
  return j.dump(2);
}

ModelConfig model_config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid model JSON: ") + e.what());
  }
  try {
    const int d = j.at("d").get<int>();
    const int L = j.at("L").get<int>();
    const int B = j.at("B").get<int>();
    Observable obs = observable_from_json(j.value("observable", nlohmann::json()), d);
    ModelConfig config{ModelSpec(d, L, B, std::move(obs)),
                       j.value("seed", std::uint64_t{0})};
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid model JSON: ") + e.what());
  }
}

std::uint64_t model_hash(const ModelSpec& spec, const Eigen::VectorXd& theta) {
  std::uint64_t h = fnv1a(model_config_to_json(ModelConfig{spec, 0}));
  static_assert(sizeof(double) == 8);
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &theta(i), sizeof(bits));
    char buf[8];
    std::memcpy(buf, &bits, sizeof(buf));
    h = fnv1a(std::string_view(buf, 8), h);
  }
  return h;
}

}  // namespace qsurr
