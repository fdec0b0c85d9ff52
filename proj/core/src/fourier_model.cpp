#include "qsurr/fourier_model.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsurr/errors.hpp"
#include "qsurr/parallel.hpp"

namespace qsurr {

namespace {

/// Positive half-lattice frequencies (canonical indices above the zero
/// frequency) as a dense real matrix, one frequency per row.
Eigen::MatrixXd positive_frequencies(const FrequencySet& freq) {
  const Eigen::Index half = freq.zero_index();
  const int d = freq.d();
  Eigen::MatrixXd out(half, d);
  std::vector<int> buf(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < half; ++i) {
    freq.frequency_at(freq.zero_index() + 1 + i, buf.data());
    for (int a = 0; a < d; ++a) out(i, a) = buf[static_cast<std::size_t>(a)];
  }
  return out;
}

void check_dimension(const FrequencySet& freq, const Eigen::VectorXd& x) {
  if (x.size() != freq.d())
    throw argument_error("input has wrong dimension");
}

}  // namespace

RealFourierModel zero_fourier_model(const FrequencySet& freq) {
  const Eigen::Index half = freq.zero_index();
  return RealFourierModel{freq, Eigen::VectorXd::Zero(half + 1),
                          Eigen::VectorXd::Zero(half)};
}

double evaluate(const RealFourierModel& m, const Eigen::VectorXd& x) {
  check_dimension(m.freq, x);
  const Eigen::Index half = m.half();
  double acc = m.cos_coeffs(0);
  std::vector<int> buf(static_cast<std::size_t>(m.freq.d()));
  for (Eigen::Index i = 0; i < half; ++i) {
    m.freq.frequency_at(m.freq.zero_index() + 1 + i, buf.data());
    double angle = 0.0;
    for (int a = 0; a < m.freq.d(); ++a)
      angle += buf[static_cast<std::size_t>(a)] * x(a);
    acc += m.cos_coeffs(i + 1) * std::cos(angle) +
           m.sin_coeffs(i) * std::sin(angle);
  }
  return acc;
}

Eigen::VectorXd design_row(const FrequencySet& freq,
                           const Eigen::VectorXd& x) {
  check_dimension(freq, x);
  const Eigen::MatrixXd omegas = positive_frequencies(freq);
  const Eigen::Index half = omegas.rows();
  Eigen::VectorXd row(2 * half + 1);
  row(0) = 1.0;
  const Eigen::VectorXd angles = omegas * x;
  for (Eigen::Index i = 0; i < half; ++i) {
    row(1 + i) = std::cos(angles(i));
    row(1 + half + i) = std::sin(angles(i));
  }
  return row;
}

Eigen::MatrixXd design_matrix(const FrequencySet& freq,
                              const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != freq.d())
    throw argument_error("inputs have wrong dimension");
  const Eigen::MatrixXd omegas = positive_frequencies(freq);
  const Eigen::Index half = omegas.rows();
  const Eigen::Index n = inputs.rows();
  const Eigen::MatrixXd angles = inputs * omegas.transpose();  // n x half
  Eigen::MatrixXd design(n, 2 * half + 1);
  design.col(0).setOnes();
  design.block(0, 1, n, half) = angles.array().cos();
  design.block(0, 1 + half, n, half) = angles.array().sin();
  return design;
}

Eigen::VectorXd coefficient_gradient(const RealFourierModel& m,
                                     const Eigen::VectorXd& x,
                                     double residual) {
  return 2.0 * residual * design_row(m.freq, x);
}

Eigen::VectorXd pack_coefficients(const RealFourierModel& m) {
  const Eigen::Index half = m.half();
  Eigen::VectorXd packed(2 * half + 1);
  packed.head(half + 1) = m.cos_coeffs;
  packed.tail(half) = m.sin_coeffs;
  return packed;
}

RealFourierModel unpack_coefficients(const FrequencySet& freq,
                                     const Eigen::VectorXd& packed) {
  const Eigen::Index half = freq.zero_index();
  if (packed.size() != 2 * half + 1)
    throw argument_error("packed coefficient vector has wrong length");
  return RealFourierModel{freq, packed.head(half + 1), packed.tail(half)};
}

RealFourierModel real_from_surrogate(const FourierSurrogate& s) {
  const Eigen::Index half = s.freq.zero_index();
  if (s.coefficients.size() != s.freq.size())
    throw argument_error("coefficient vector has wrong length");
  RealFourierModel m{s.freq, Eigen::VectorXd(half + 1),
                     Eigen::VectorXd(half)};
  m.cos_coeffs(0) = s.coefficients(s.freq.zero_index()).real();
  for (Eigen::Index i = 0; i < half; ++i) {
    const Complex c = s.coefficients(s.freq.zero_index() + 1 + i);
    m.cos_coeffs(i + 1) = 2.0 * c.real();
    m.sin_coeffs(i) = 2.0 * c.imag();
  }
  return m;
}

Eigen::VectorXcd complex_coefficients(const RealFourierModel& m) {
  const Eigen::Index half = m.half();
  Eigen::VectorXcd c(m.freq.size());
  c(m.freq.zero_index()) = Complex(m.cos_coeffs(0), 0.0);
  for (Eigen::Index i = 0; i < half; ++i) {
    const Complex ci(0.5 * m.cos_coeffs(i + 1), 0.5 * m.sin_coeffs(i));
    const std::int64_t k = m.freq.zero_index() + 1 + i;
    c(k) = ci;
    c(m.freq.negation_index(k)) = std::conj(ci);
  }
  return c;
}

std::string real_model_to_json(const RealFourierModel& m) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["real"] = true;
  j["d"] = m.freq.d();
  j["per_feature_max"] = m.freq.per_feature_max();
  j["cos_coefficients"] = std::vector<double>(
      m.cos_coeffs.data(), m.cos_coeffs.data() + m.cos_coeffs.size());
  j["sin_coefficients"] = std::vector<double>(
      m.sin_coeffs.data(), m.sin_coeffs.data() + m.sin_coeffs.size());
  return j.dump(2);
}

RealFourierModel real_model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid model JSON: ") + e.what());
  }
  try {
    if (j.value("schema_version", 1) != 1)
      throw parse_error("unsupported model schema version");
    FrequencySet freq = FrequencySet::from_maxima(
        j.at("per_feature_max").get<std::vector<int>>());
    const auto cosv = j.at("cos_coefficients").get<std::vector<double>>();
    const auto sinv = j.at("sin_coefficients").get<std::vector<double>>();
    const Eigen::Index half = freq.zero_index();
    if (static_cast<Eigen::Index>(cosv.size()) != half + 1 ||
        static_cast<Eigen::Index>(sinv.size()) != half)
      throw parse_error("coefficient counts do not match the lattice");
    RealFourierModel m{std::move(freq),
                       Eigen::Map<const Eigen::VectorXd>(
                           cosv.data(), static_cast<Eigen::Index>(cosv.size())),
                       Eigen::Map<const Eigen::VectorXd>(
                           sinv.data(), static_cast<Eigen::Index>(sinv.size()))};
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid model JSON: ") + e.what());
  }
}

std::pair<RealFourierModel, FitReport> linear_best_fit(
    const Eigen::MatrixXd& inputs, const Eigen::VectorXd& labels,
    const FrequencySet& freq) {
  if (inputs.rows() == 0) throw argument_error("cannot fit an empty dataset");
  if (inputs.rows() != labels.size())
    throw argument_error("inputs and labels disagree on the sample count");
  const Eigen::MatrixXd design = design_matrix(freq, inputs);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  FitReport report;
  report.rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > 1e-10 * sigma_max) ++report.rank;
  const double sigma_min = sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
  report.condition_number =
      sigma_min > 0.0 ? sigma_max / sigma_min
                      : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd packed = svd.solve(labels);
  report.residual =
      (design * packed - labels).squaredNorm() /
      static_cast<double>(inputs.rows());
  return {unpack_coefficients(freq, packed), report};
}

std::pair<RealFourierModel, FitReport> linear_best_fit(
    const Dataset& data, const FrequencySet& freq) {
  if (data.split.train.empty()) return linear_best_fit(data.inputs, data.labels, freq);
  return linear_best_fit(select_rows(data.inputs, data.split.train),
                         select_rows(data.labels, data.split.train), freq);
}

double condition_lower_bound(const Eigen::VectorXd& x_i,
                             const Eigen::VectorXd& x_j,
                             const FrequencySet& freq) {
  check_dimension(freq, x_i);
  check_dimension(freq, x_j);
  if (x_i == x_j) return std::numeric_limits<double>::infinity();
  const int d = freq.d();
  std::vector<int> buf(static_cast<std::size_t>(d));
  double sum_sq = 0.0;
  double diff_sq = 0.0;
  for (std::int64_t k = 0; k < freq.size(); ++k) {
    freq.frequency_at(k, buf.data());
    double phase_i = 0.0;
    double phase_j = 0.0;
    for (int a = 0; a < d; ++a) {
      phase_i += buf[static_cast<std::size_t>(a)] * x_i(a);
      phase_j += buf[static_cast<std::size_t>(a)] * x_j(a);
    }
    const Complex ai = std::exp(Complex(0.0, -phase_i));
    const Complex aj = std::exp(Complex(0.0, -phase_j));
    sum_sq += std::norm(ai + aj);
    diff_sq += std::norm(ai - aj);
  }
  if (diff_sq <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(sum_sq / diff_sq);
}

double fourier_mse(const FrequencySet& freq, const Eigen::VectorXd& packed,
                   const Eigen::MatrixXd& inputs,
                   const Eigen::VectorXd& labels) {
  if (inputs.rows() == 0) throw argument_error("empty evaluation set");
  const Eigen::MatrixXd design = design_matrix(freq, inputs);
  return (design * packed - labels).squaredNorm() /
         static_cast<double>(inputs.rows());
}

std::pair<RealFourierModel, LossTrace> train_fourier_model(
    const FrequencySet& freq, const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& labels, const Eigen::MatrixXd& val_inputs,
    const Eigen::VectorXd& val_labels, const OptimizerConfig& config) {
  if (inputs.rows() == 0) throw argument_error("empty training set");
  if (inputs.rows() != labels.size())
    throw argument_error("inputs and labels disagree on the sample count");
  const Eigen::MatrixXd design = design_matrix(freq, inputs);
  const double inv_n = 1.0 / static_cast<double>(inputs.rows());
  const Objective objective = [&](const Eigen::VectorXd& packed,
                                  Eigen::VectorXd* grad) {
    const Eigen::VectorXd residual = design * packed - labels;
    if (grad) *grad = 2.0 * inv_n * (design.transpose() * residual);
    return residual.squaredNorm() * inv_n;
  };
  std::function<double(const Eigen::VectorXd&)> validation;
  Eigen::MatrixXd val_design;
  if (val_inputs.rows() > 0) {
    val_design = design_matrix(freq, val_inputs);
    const double inv_m = 1.0 / static_cast<double>(val_inputs.rows());
    validation = [&val_design, &val_labels, inv_m](const Eigen::VectorXd& c) {
      return (val_design * c - val_labels).squaredNorm() * inv_m;
    };
  }
  Eigen::VectorXd packed = Eigen::VectorXd::Zero(freq.size());
  LossTrace trace = minimize(objective, packed, config, validation);
  return {unpack_coefficients(freq, packed), std::move(trace)};
}

std::pair<Eigen::VectorXd, LossTrace> train_quantum_model(
    const ModelSpec& spec, const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& labels, const Eigen::MatrixXd& val_inputs,
    const Eigen::VectorXd& val_labels, const OptimizerConfig& config,
    std::uint64_t seed, int jobs) {
  if (inputs.rows() == 0) throw argument_error("empty training set");
  if (inputs.rows() != labels.size())
    throw argument_error("inputs and labels disagree on the sample count");
  if (inputs.cols() != spec.d())
    throw argument_error("inputs have wrong dimension");
  const Eigen::Index n = inputs.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Per-point values and parameter-shift gradients are computed in
  // parallel into preallocated rows, then reduced sequentially so the
  // result does not depend on the worker count.
  Eigen::VectorXd values(n);
  Eigen::MatrixXd point_grads;
  const Objective objective = [&](const Eigen::VectorXd& theta,
                                  Eigen::VectorXd* grad) -> double {
    if (grad) point_grads.resize(n, spec.parameter_count());
    parallel_for(n, jobs, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t i = begin; i < end; ++i) {
        const Eigen::VectorXd x = inputs.row(i).transpose();
        values(i) = evaluate_exact(spec, theta, x);
        if (grad)
          point_grads.row(i) =
              gradient_parameter_shift(spec, theta, x).transpose();
      }
    });
    double loss = 0.0;
    if (grad) grad->setZero(spec.parameter_count());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = values(i) - labels(i);
      loss += r * r;
      if (grad) *grad += (2.0 * inv_n * r) * point_grads.row(i).transpose();
    }
    return loss * inv_n;
  };

  std::function<double(const Eigen::VectorXd&)> validation;
  if (val_inputs.rows() > 0) {
    validation = [&](const Eigen::VectorXd& theta) {
      const Eigen::Index m = val_inputs.rows();
      Eigen::VectorXd val_values(m);
      parallel_for(m, jobs, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i)
          val_values(i) = evaluate_exact(spec, theta,
                                         val_inputs.row(i).transpose());
      });
      return (val_values - val_labels).squaredNorm() /
             static_cast<double>(m);
    };
  }

  Eigen::VectorXd theta = random_parameters(spec, seed);
  LossTrace trace = minimize(objective, theta, config, validation);
  return {std::move(theta), std::move(trace)};
}

}  // namespace qsurr
