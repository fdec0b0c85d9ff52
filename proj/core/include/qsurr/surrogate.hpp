#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "qsurr/model.hpp"
#include "qsurr/spectrum.hpp"

namespace qsurr {

/// Shot accounting for a sup-norm certificate: running `shots_per_point`
/// shots at each of the `grid_size` reconstruction points keeps the
/// surrogate within `epsilon` of the model everywhere, except with
/// probability at most `delta`.
struct SurrogationBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t grid_size = 0;      // T
  double observable_norm = 1.0;    // sup of |f|
  std::int64_t shots_per_point = 0;
  std::int64_t total_shots = 0;    // grid_size * shots_per_point
};

/// Pre-ceiling value of the certified per-point shot count,
/// (2 m^2 / eps^2) (ln(1/delta) + T ln 2). Exposed for oracle tests.
double shot_budget_raw(double epsilon, double delta, std::int64_t grid_size,
                       double observable_norm);

/// Smallest integer shot budget meeting the certificate.
SurrogationBudget shot_budget(double epsilon, double delta,
                              std::int64_t grid_size, double observable_norm);

/// Shots needed to instead estimate every coefficient directly on the
/// quantum model at query time: ceil((2 T m^2 / eps^2) ln(2T/delta)).
/// The surrogate's one-off cost exceeds this by a factor only sub-linear
/// in T.
std::int64_t inference_budget(double epsilon, double delta,
                              std::int64_t grid_size, double observable_norm);

/// Tightest epsilon certified by a given per-point shot count at fixed
/// (delta, T): the budget formula solved for epsilon.
double certified_epsilon(std::int64_t shots_per_point, double delta,
                         std::int64_t grid_size, double observable_norm);

enum class SurrogateMode { exact, shots };

/// How a surrogate was produced, kept alongside its coefficients.
/// `certificate_valid` records whether shots_per_point met the budget for
/// (epsilon, delta); exact extraction is always certified at epsilon = 0.
struct Provenance {
  SurrogateMode mode = SurrogateMode::exact;
  std::int64_t shots_per_point = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  bool certificate_valid = true;
  std::uint64_t model_hash = 0;
};

/// Truncated Fourier series g(x) = sum_omega c_omega exp(-i omega . x) with
/// coefficients in canonical lattice order. Hermitian symmetry
/// c_{-omega} = conj(c_omega) keeps g real.
struct FourierSurrogate {
  FrequencySet freq;
  Eigen::VectorXcd coefficients;
  Provenance provenance;
};

/// Extracts the exact coefficients of a model by evaluating it on the
/// reconstruction grid and applying the inverse transform c = A^H y / T
/// (the grid makes the design matrix a scaled unitary, so no solver is
/// needed). Grid evaluations fan out over `jobs` workers.
FourierSurrogate surrogate_exact(const ModelSpec& spec,
                                 const Eigen::VectorXd& theta, int jobs = 0,
                                 std::int64_t grid_cap = kDefaultGridCap);

/// Same as surrogate_exact but each grid value is a shot estimate with
/// budget.shots_per_point samples. Coefficients are Hermitian-symmetrized.
/// Per-point seeds derive from (seed, grid index), so results are
/// independent of the worker count.
FourierSurrogate surrogate_with_shots(const ModelSpec& spec,
                                      const Eigen::VectorXd& theta,
                                      const SurrogationBudget& budget,
                                      std::uint64_t seed, int jobs = 0,
                                      std::int64_t grid_cap = kDefaultGridCap);

/// Re sum_omega c_omega exp(-i omega . x).
double evaluate_surrogate(const FourierSurrogate& s, const Eigen::VectorXd& x);

/// Estimated sup_x |f(x) - g(x)| over an equispaced probe grid plus the
/// same number of uniform random points; a lower bound on the true
/// supremum. probe_points_per_dim <= 0 selects a default by dimension
/// (256 for d <= 2, 32 for d = 3, 10^4 random points for d >= 4).
double sup_error_estimate(const std::function<double(const Eigen::VectorXd&)>& f,
                          const FourierSurrogate& g, int probe_points_per_dim,
                          std::uint64_t seed, int jobs = 0);

/// Convenience overload probing a model against its surrogate.
double sup_error_estimate(const ModelSpec& spec, const Eigen::VectorXd& theta,
                          const FourierSurrogate& g, std::uint64_t seed,
                          int jobs = 0);

/// JSON round-trip is bit-exact: doubles are emitted with shortest
/// round-trip precision.
std::string surrogate_to_json(const FourierSurrogate& s);
FourierSurrogate surrogate_from_json(std::string_view text);
void save_surrogate(const FourierSurrogate& s, const std::string& path);
FourierSurrogate load_surrogate(const std::string& path);

}  // namespace qsurr
