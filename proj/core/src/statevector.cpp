#include "qsurr/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "qsurr/errors.hpp"

namespace qsurr {

StateVector::StateVector(int n_qubits, Eigen::VectorXcd amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::zero_state(int n_qubits) {
  if (n_qubits < 0) throw argument_error("n_qubits must be non-negative");
  if (n_qubits > kMaxQubits)
    throw resource_error("register of " + std::to_string(n_qubits) +
                         " qubits exceeds the cap of " +
                         std::to_string(kMaxQubits));
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_qubits);
  amps(0) = Complex(1.0, 0.0);
  return StateVector(n_qubits, std::move(amps));
}

Gate Gate::rx(double phi, int qubit) {
  Gate g;
  g.kind = GateKind::RX;
  g.angles = {phi, 0.0, 0.0};
  g.qubit = qubit;
  return g;
}

Gate Gate::rz(double phi, int qubit) {
  Gate g;
  g.kind = GateKind::RZ;
  g.angles = {phi, 0.0, 0.0};
  g.qubit = qubit;
  return g;
}

Gate Gate::rot(double alpha, double beta, double gamma, int qubit) {
  Gate g;
  g.kind = GateKind::Rot;
  g.angles = {alpha, beta, gamma};
  g.qubit = qubit;
  return g;
}

Gate Gate::cnot(int control, int target) {
  Gate g;
  g.kind = GateKind::CNOT;
  g.qubit = control;
  g.target = target;
  return g;
}

namespace {

Eigen::Matrix2cd rx_matrix(double phi) {
  const double c = std::cos(phi / 2.0);
  const double s = std::sin(phi / 2.0);
  Eigen::Matrix2cd m;
  m << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0);
  return m;
}

Eigen::Matrix2cd rz_matrix(double phi) {
  Eigen::Matrix2cd m;
  m << std::polar(1.0, -phi / 2.0), Complex(0, 0), Complex(0, 0),
      std::polar(1.0, phi / 2.0);
  return m;
}

}  // namespace

Eigen::Matrix2cd Gate::single_qubit_matrix() const {
  switch (kind) {
    case GateKind::RX:
      return rx_matrix(angles[0]);
    case GateKind::RZ:
      return rz_matrix(angles[0]);
    case GateKind::Rot:
      return rx_matrix(angles[0]) * rz_matrix(angles[1]) * rx_matrix(angles[2]);
    case GateKind::CNOT:
      break;
  }
  throw argument_error("CNOT has no single-qubit matrix");
}

namespace {

void check_qubit(int q, int n, const char* role) {
  if (q < 0 || q >= n)
    throw std::out_of_range(std::string(role) + " qubit " + std::to_string(q) +
                            " out of range for " + std::to_string(n) +
                            " qubits");
}

void apply_single_qubit(Eigen::VectorXcd& amps, int n, int qubit,
                        const Eigen::Matrix2cd& m) {
  check_qubit(qubit, n, "target");
  const Eigen::Index dim = amps.size();
  const Eigen::Index stride = Eigen::Index(1) << (n - 1 - qubit);
  const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  Complex* a = amps.data();
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      const Complex a0 = a[i];
      const Complex a1 = a[i + stride];
      a[i] = m00 * a0 + m01 * a1;
      a[i + stride] = m10 * a0 + m11 * a1;
    }
  }
}

void apply_cnot(Eigen::VectorXcd& amps, int n, int control, int target) {
  check_qubit(control, n, "control");
  check_qubit(target, n, "target");
  if (control == target)
    throw argument_error("CNOT control and target must be distinct");
  const Eigen::Index dim = amps.size();
  const Eigen::Index cmask = Eigen::Index(1) << (n - 1 - control);
  const Eigen::Index tmask = Eigen::Index(1) << (n - 1 - target);
  Complex* a = amps.data();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(a[i], a[i | tmask]);
  }
}

}  // namespace

void apply_gate_in_place(StateVector& state, const Gate& gate) {
  if (gate.kind == GateKind::CNOT) {
    apply_cnot(state.amplitudes(), state.n_qubits(), gate.qubit, gate.target);
  } else {
    apply_single_qubit(state.amplitudes(), state.n_qubits(), gate.qubit,
                       gate.single_qubit_matrix());
  }
}

StateVector apply_gate(StateVector state, const Gate& gate) {
  apply_gate_in_place(state, gate);
  return state;
}

Observable::Observable(std::vector<PauliTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw argument_error("observable needs at least one term");
  n_qubits_ = static_cast<int>(terms_.front().paulis.size());
  for (const auto& t : terms_) {
    if (static_cast<int>(t.paulis.size()) != n_qubits_)
      throw argument_error("all Pauli words must have the same length");
    for (char c : t.paulis) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
        throw argument_error(std::string("invalid Pauli letter '") + c + "'");
    }
    operator_norm_ += std::abs(t.coefficient);
  }
}

Observable Observable::z_on_qubit(int qubit, int n_qubits) {
  check_qubit(qubit, n_qubits, "observable");
  std::string word(static_cast<std::size_t>(n_qubits), 'I');
  word[static_cast<std::size_t>(qubit)] = 'Z';
  return Observable({PauliTerm{1.0, word}});
}

double pauli_expectation(const StateVector& state, const std::string& word) {
  const int n = state.n_qubits();
  if (static_cast<int>(word.size()) != n)
    throw argument_error("Pauli word length does not match register width");

  // P maps |i> to phase(i) |i ^ flip>; the expectation is a single pass
  // sum_i conj(psi_{i^flip}) phase(i) psi_i.
  Eigen::Index flip = 0;
  Eigen::Index zmask = 0;
  Eigen::Index ymask = 0;
  for (int q = 0; q < n; ++q) {
    const Eigen::Index bit = Eigen::Index(1) << (n - 1 - q);
    switch (word[static_cast<std::size_t>(q)]) {
      case 'X':
        flip |= bit;
        break;
      case 'Y':
        flip |= bit;
        ymask |= bit;
        break;
      case 'Z':
        zmask |= bit;
        break;
      default:
        break;
    }
  }

  const Eigen::VectorXcd& psi = state.amplitudes();
  const Complex* a = psi.data();
  const Eigen::Index dim = psi.size();
  const int y_count = static_cast<int>(__builtin_popcountll(
      static_cast<unsigned long long>(ymask)));
  // i^y phase from the Y letters; per index, each Y qubit in |1> contributes
  // an extra -1 (from -i vs +i).
  static constexpr Complex kIPow[4] = {Complex(1, 0), Complex(0, 1),
                                       Complex(-1, 0), Complex(0, -1)};
  const Complex y_base = kIPow[y_count & 3];

  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int z_par = __builtin_popcountll(
                          static_cast<unsigned long long>(i & zmask)) &
                      1;
    const int y_par = __builtin_popcountll(
                          static_cast<unsigned long long>(i & ymask)) &
                      1;
    Complex phase = y_base;
    if (z_par ^ y_par) phase = -phase;
    acc += std::conj(a[i ^ flip]) * phase * a[i];
  }
  return std::clamp(acc.real(), -1.0, 1.0);
}

double expectation(const StateVector& state, const Observable& obs) {
  if (obs.n_qubits() != state.n_qubits())
    throw argument_error("observable width does not match register width");
  double value = 0.0;
  for (const auto& t : obs.terms())
    value += t.coefficient * pauli_expectation(state, t.paulis);
  return value;
}

}  // namespace qsurr
