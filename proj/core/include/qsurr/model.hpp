#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qsurr/statevector.hpp"

namespace qsurr {

/// Architecture of a variational re-uploading model: d features encoded one
/// qubit each, L encoding layers interleaved with L+1 trainable blocks, each
/// block made of B block layers (one three-angle rotation per qubit followed
/// by a CNOT ring of range b).
class ModelSpec {
 public:
  ModelSpec(int d, int L, int B);
  ModelSpec(int d, int L, int B, Observable observable);

  int d() const noexcept { return d_; }
  int num_layers() const noexcept { return L_; }
  int num_block_layers() const noexcept { return B_; }
  int n_qubits() const noexcept { return d_; }
  const Observable& observable() const noexcept { return observable_; }

  /// (L+1) * B * d * 3 trainable angles.
  Eigen::Index parameter_count() const noexcept;

  /// Flat index of angle `angle` of the rotation on `qubit` in block layer
  /// `block_layer` (1-based) of trainable block `layer` (0-based, 0..L).
  Eigen::Index theta_index(int layer, int block_layer, int qubit,
                           int angle) const;

 private:
  int d_;
  int L_;
  int B_;
  Observable observable_;
};

/// Uniform angles on [0, 2pi), deterministic in the seed.
Eigen::VectorXd random_parameters(const ModelSpec& spec, std::uint64_t seed);

/// Runs the circuit W(L) S(x) ... W(1) S(x) W(0) on |0.."0> and returns the
/// final state.
StateVector prepare_state(const ModelSpec& spec, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& x);

/// f_theta(x): exact expectation of the observable after the circuit.
double evaluate_exact(const ModelSpec& spec, const Eigen::VectorXd& theta,
                      const Eigen::VectorXd& x);

/// Sample mean of `shots` single-shot measurements. Each Pauli term is
/// sampled independently (outcome +-1 with p(+1) = (1+<P>)/2) and the term
/// means are combined linearly, so for multi-term observables the estimator
/// variance is the sum of the per-term variances. Unbiased for
/// evaluate_exact; deterministic in rng_seed.
double estimate_with_shots(const ModelSpec& spec, const Eigen::VectorXd& theta,
                           const Eigen::VectorXd& x, std::int64_t shots,
                           std::uint64_t rng_seed);

/// Exact gradient d f/d theta_k via the two-point parameter-shift rule
/// (f(theta_k + pi/2) - f(theta_k - pi/2)) / 2, valid because every
/// trainable gate is a Pauli half-angle rotation.
Eigen::VectorXd gradient_parameter_shift(const ModelSpec& spec,
                                         const Eigen::VectorXd& theta,
                                         const Eigen::VectorXd& x);

/// Model configuration document: {schema_version, d, L, B, observable, seed}.
/// The seed is used to draw parameters when no explicit theta is supplied.
struct ModelConfig {
  ModelSpec spec;
  std::uint64_t seed = 0;
};

std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(std::string_view text);

/// FNV-1a digest over the serialized spec and the raw theta bytes; labels
/// surrogate files with the model they were extracted from.
std::uint64_t model_hash(const ModelSpec& spec, const Eigen::VectorXd& theta);

}  // namespace qsurr
