#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "qsurr/dataset.hpp"
#include "qsurr/model.hpp"
#include "qsurr/optim.hpp"
#include "qsurr/spectrum.hpp"
#include "qsurr/surrogate.hpp"

namespace qsurr {

/// Real reparametrization of a truncated Fourier series:
///   g(x) = cos_coeffs[0]
///        + sum_i cos_coeffs[i] cos(omega_i . x) + sin_coeffs[i-1] sin(...)
/// where omega_i runs over the positive half-lattice (canonical indices
/// above the zero frequency, i.e. first nonzero component positive).
/// Parameter count is 1 + 2 * half = T.
struct RealFourierModel {
  FrequencySet freq;
  Eigen::VectorXd cos_coeffs;  // half + 1 entries, [0] is the constant term
  Eigen::VectorXd sin_coeffs;  // half entries

  /// Number of +-omega pairs, (T - 1) / 2.
  Eigen::Index half() const { return freq.zero_index(); }
};

/// Zero-initialized model over a frequency set.
RealFourierModel zero_fourier_model(const FrequencySet& freq);

double evaluate(const RealFourierModel& m, const Eigen::VectorXd& x);

/// Feature row phi(x) = [1, cos(omega_i . x)..., sin(omega_i . x)...] in
/// packed coefficient order; evaluate(m, x) = phi(x) . packed(m).
Eigen::VectorXd design_row(const FrequencySet& freq, const Eigen::VectorXd& x);

/// Stacked design rows for every input row.
Eigen::MatrixXd design_matrix(const FrequencySet& freq,
                              const Eigen::MatrixXd& inputs);

/// Gradient of (evaluate(m, x) - y)^2 with respect to the packed
/// coefficients, with residual = evaluate(m, x) - y supplied by the caller:
/// 2 * residual * phi(x).
Eigen::VectorXd coefficient_gradient(const RealFourierModel& m,
                                     const Eigen::VectorXd& x,
                                     double residual);

Eigen::VectorXd pack_coefficients(const RealFourierModel& m);
RealFourierModel unpack_coefficients(const FrequencySet& freq,
                                     const Eigen::VectorXd& packed);

/// Real view of a (Hermitian) complex coefficient vector and back:
/// c_0 = cos_coeffs[0], c_omega = (cos + i sin)/2 on the positive half,
/// c_{-omega} = conj(c_omega). Evaluation agrees with the complex form.
RealFourierModel real_from_surrogate(const FourierSurrogate& s);
Eigen::VectorXcd complex_coefficients(const RealFourierModel& m);

std::string real_model_to_json(const RealFourierModel& m);
RealFourierModel real_model_from_json(std::string_view text);

/// Result quality of a least-squares fit.
struct FitReport {
  double residual = 0.0;          // mean squared error on the fitted data
  double condition_number = 1.0;  // sigma_max / sigma_min of the design
  Eigen::Index rank = 0;          // singular values above 1e-10 * sigma_max
};

/// Minimum-norm least-squares coefficients via SVD of the design matrix.
/// The returned residual is the global optimum over all coefficient
/// vectors, hence a lower bound on any trained model with this spectrum.
std::pair<RealFourierModel, FitReport> linear_best_fit(
    const Eigen::MatrixXd& inputs, const Eigen::VectorXd& labels,
    const FrequencySet& freq);

/// Fits the training split when one is recorded, else all rows.
std::pair<RealFourierModel, FitReport> linear_best_fit(
    const Dataset& data, const FrequencySet& freq);

/// Lower bound on the condition number of any square design matrix whose
/// rows include both probe points: ||a_i + a_j|| / ||a_i - a_j|| over the
/// complex Fourier feature columns. Exactly coincident points return
/// +infinity (the fit is ill-posed).
double condition_lower_bound(const Eigen::VectorXd& x_i,
                             const Eigen::VectorXd& x_j,
                             const FrequencySet& freq);

/// Mean squared error of a coefficient vector against (inputs, labels).
double fourier_mse(const FrequencySet& freq, const Eigen::VectorXd& packed,
                   const Eigen::MatrixXd& inputs,
                   const Eigen::VectorXd& labels);

/// Full-batch training of the Fourier coefficients from zero init.
/// Validation inputs may be empty (no validation curve).
std::pair<RealFourierModel, LossTrace> train_fourier_model(
    const FrequencySet& freq, const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& labels, const Eigen::MatrixXd& val_inputs,
    const Eigen::VectorXd& val_labels, const OptimizerConfig& config);

/// Full-batch training of a re-uploading model from seeded random init,
/// with parameter-shift gradients. Returns the trained angles.
std::pair<Eigen::VectorXd, LossTrace> train_quantum_model(
    const ModelSpec& spec, const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& labels, const Eigen::MatrixXd& val_inputs,
    const Eigen::VectorXd& val_labels, const OptimizerConfig& config,
    std::uint64_t seed, int jobs = 0);

}  // namespace qsurr
