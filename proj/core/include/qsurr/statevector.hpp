#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qsurr {

using Complex = std::complex<double>;

/// Hard cap on register width; anything wider than 2^24 amplitudes is
/// refused rather than silently thrashing memory.
inline constexpr int kMaxQubits = 24;

/// Dense statevector over n qubits. Qubit 0 is the most significant bit of
/// the basis index: |q0 q1 ... q_{n-1}> lives at index sum_i q_i 2^{n-1-i}.
/// n = 0 is the scalar edge case with a single amplitude.
class StateVector {
 public:
  /// All-zero computational basis state |0...0>.
  static StateVector zero_state(int n_qubits);

  int n_qubits() const noexcept { return n_qubits_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() noexcept { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }

 private:
  StateVector(int n_qubits, Eigen::VectorXcd amplitudes);

  int n_qubits_;
  Eigen::VectorXcd amplitudes_;
};

enum class GateKind { RX, RZ, Rot, CNOT };

/// One circuit element. RX(phi) = exp(-i phi X/2), RZ(phi) = exp(-i phi Z/2),
/// Rot(a,b,c) is the matrix product RX(a) RZ(b) RX(c) (RX(c) acts first on
/// the state), CNOT flips `target` when `control` is set.
struct Gate {
  GateKind kind = GateKind::RX;
  std::array<double, 3> angles{0.0, 0.0, 0.0};
  int qubit = -1;   // target of a rotation; control of a CNOT
  int target = -1;  // CNOT target, unused otherwise

  static Gate rx(double phi, int qubit);
  static Gate rz(double phi, int qubit);
  static Gate rot(double alpha, double beta, double gamma, int qubit);
  static Gate cnot(int control, int target);

  /// 2x2 unitary of a rotation gate. Invalid for CNOT.
  Eigen::Matrix2cd single_qubit_matrix() const;
};

/// Applies the gate to the state in place with stride kernels.
void apply_gate_in_place(StateVector& state, const Gate& gate);

/// Value-semantics variant.
StateVector apply_gate(StateVector state, const Gate& gate);

/// Weighted Pauli word: coefficient times a tensor product of I/X/Y/Z,
/// spelled as one letter per qubit (qubit 0 first).
struct PauliTerm {
  double coefficient = 1.0;
  std::string paulis;
};

/// Hermitian observable given as a sum of weighted Pauli words. The cached
/// operator norm is the sum of |coefficients|, an upper bound on the true
/// spectral norm that is tight when the words are distinct.
class Observable {
 public:
  explicit Observable(std::vector<PauliTerm> terms);

  static Observable z_on_qubit(int qubit, int n_qubits);

  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
  int n_qubits() const noexcept { return n_qubits_; }
  double operator_norm() const noexcept { return operator_norm_; }

 private:
  std::vector<PauliTerm> terms_;
  int n_qubits_ = 0;
  double operator_norm_ = 0.0;
};

/// <psi|P|psi> for a single Pauli word, clamped to [-1, 1].
double pauli_expectation(const StateVector& state, const std::string& word);

/// <psi|M|psi>. Real by Hermiticity; the imaginary residue is discarded.
/// The result is clamped to [-norm, norm] term by term.
double expectation(const StateVector& state, const Observable& obs);

}  // namespace qsurr
