#include "qsurr/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsurr/errors.hpp"
#include "qsurr/io.hpp"
#include "qsurr/parallel.hpp"
#include "qsurr/rng.hpp"

namespace qsurr {

namespace {

void check_budget_args(double epsilon, double delta, std::int64_t grid_size,
                       double observable_norm) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw argument_error("epsilon must be positive");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw argument_error("delta must lie in (0, 1)");
  if (grid_size < 1) throw argument_error("grid size must be >= 1");
  if (!(observable_norm > 0.0) || !std::isfinite(observable_norm))
    throw argument_error("observable norm must be positive");
}

std::int64_t ceil_to_count(double raw, const char* what) {
  if (!(raw < 9.2e18))
    throw resource_error(std::string(what) + " overflows a 64-bit count");
  return static_cast<std::int64_t>(std::ceil(raw));
}

}  // namespace

double shot_budget_raw(double epsilon, double delta, std::int64_t grid_size,
                       double observable_norm) {
  check_budget_args(epsilon, delta, grid_size, observable_norm);
  const double m2 = observable_norm * observable_norm;
  return (2.0 * m2 / (epsilon * epsilon)) *
         (-std::log(delta) +
          static_cast<double>(grid_size) * std::numbers::ln2);
}

SurrogationBudget shot_budget(double epsilon, double delta,
                              std::int64_t grid_size, double observable_norm) {
  const double raw = shot_budget_raw(epsilon, delta, grid_size,
                                     observable_norm);
  SurrogationBudget budget;
  budget.epsilon = epsilon;
  budget.delta = delta;
  budget.grid_size = grid_size;
  budget.observable_norm = observable_norm;
  budget.shots_per_point = ceil_to_count(raw, "shot budget");
  if (budget.shots_per_point >
      std::numeric_limits<std::int64_t>::max() / grid_size)
    throw resource_error("total shot count overflows a 64-bit count");
  budget.total_shots = budget.shots_per_point * grid_size;
  return budget;
}

std::int64_t inference_budget(double epsilon, double delta,
                              std::int64_t grid_size,
                              double observable_norm) {
  check_budget_args(epsilon, delta, grid_size, observable_norm);
  const double m2 = observable_norm * observable_norm;
  const double t = static_cast<double>(grid_size);
  const double raw =
      (2.0 * t * m2 / (epsilon * epsilon)) * std::log(2.0 * t / delta);
  return ceil_to_count(raw, "inference budget");
}

double certified_epsilon(std::int64_t shots_per_point, double delta,
                         std::int64_t grid_size, double observable_norm) {
  if (shots_per_point < 1) throw argument_error("shot count must be >= 1");
  check_budget_args(1.0, delta, grid_size, observable_norm);
  const double log_term =
      -std::log(delta) + static_cast<double>(grid_size) * std::numbers::ln2;
  return observable_norm *
         std::sqrt(2.0 * log_term / static_cast<double>(shots_per_point));
}

namespace {

/// In-place inverse transform on grid values in canonical order: one small
/// dense transform per axis, kernel exp(+i (dig - w) 2 pi j / T_a), then a
/// global 1/T. Equivalent to c = A^H y / T without forming A.
void grid_values_to_coefficients(const FrequencySet& freq,
                                 Eigen::VectorXcd& values) {
  const int d = freq.d();
  const auto sizes = freq.grid_sizes();
  const std::int64_t total = freq.size();
  std::int64_t stride = total;
  for (int axis = 0; axis < d; ++axis) {
    const std::int64_t t = sizes[static_cast<std::size_t>(axis)];
    const int w = freq.per_feature_max()[static_cast<std::size_t>(axis)];
    stride /= t;
    Eigen::MatrixXcd f(t, t);
    for (std::int64_t dig = 0; dig < t; ++dig)
      for (std::int64_t j = 0; j < t; ++j)
        f(dig, j) = std::exp(Complex(
            0.0, (static_cast<double>(dig) - w) * 2.0 * std::numbers::pi *
                     static_cast<double>(j) / static_cast<double>(t)));
    const std::int64_t block = stride * t;
    Eigen::VectorXcd line(t);
    for (std::int64_t outer = 0; outer < total; outer += block) {
      for (std::int64_t inner = 0; inner < stride; ++inner) {
        const std::int64_t base = outer + inner;
        for (std::int64_t j = 0; j < t; ++j) line(j) = values(base + j * stride);
        line = (f * line).eval();
        for (std::int64_t j = 0; j < t; ++j) values(base + j * stride) = line(j);
      }
    }
  }
  values /= static_cast<double>(total);
}

void check_theta(const ModelSpec& spec, const Eigen::VectorXd& theta) {
  if (theta.size() != spec.parameter_count())
    throw argument_error("theta has wrong length");
}

}  // namespace

FourierSurrogate surrogate_exact(const ModelSpec& spec,
                                 const Eigen::VectorXd& theta, int jobs,
                                 std::int64_t grid_cap) {
  check_theta(spec, theta);
  FrequencySet freq = FrequencySet::for_model(spec);
  const ReconstructionGrid grid = build_grid(freq, grid_cap);
  Eigen::VectorXcd values(grid.size());
  parallel_for(grid.size(), jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t j = begin; j < end; ++j)
      values(j) = evaluate_exact(spec, theta, grid.point(j));
  });
  grid_values_to_coefficients(freq, values);
  Provenance prov;
  prov.mode = SurrogateMode::exact;
  prov.model_hash = model_hash(spec, theta);
  return FourierSurrogate{std::move(freq), std::move(values), prov};
}

FourierSurrogate surrogate_with_shots(const ModelSpec& spec,
                                      const Eigen::VectorXd& theta,
                                      const SurrogationBudget& budget,
                                      std::uint64_t seed, int jobs,
                                      std::int64_t grid_cap) {
  check_theta(spec, theta);
  FrequencySet freq = FrequencySet::for_model(spec);
  const std::int64_t total = freq.size();
  if (budget.shots_per_point < 1)
    throw argument_error("budget must provide at least one shot per point");
  if (budget.grid_size != 0 && budget.grid_size != total)
    throw argument_error("budget grid size does not match the model");
  const double norm = spec.observable().operator_norm();
  if (budget.observable_norm > 0.0 &&
      std::abs(budget.observable_norm - norm) > 1e-9 * std::max(1.0, norm))
    throw argument_error("budget observable norm does not match the model");

  const ReconstructionGrid grid = build_grid(freq, grid_cap);
  Eigen::VectorXcd values(total);
  parallel_for(total, jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t j = begin; j < end; ++j) {
      const std::uint64_t point_seed =
          derive_seed(seed, "surrogate-grid", static_cast<std::uint64_t>(j));
      values(j) = estimate_with_shots(spec, theta, grid.point(j),
                                      budget.shots_per_point, point_seed);
    }
  });
  grid_values_to_coefficients(freq, values);
  // Model outputs are real, so the true coefficients are Hermitian;
  // averaging each +-omega pair projects the noisy estimate back onto that
  // subspace and keeps the surrogate real-valued.
  for (std::int64_t k = 0; k <= freq.zero_index(); ++k) {
    const std::int64_t nk = freq.negation_index(k);
    const Complex avg = 0.5 * (values(k) + std::conj(values(nk)));
    values(k) = avg;
    values(nk) = std::conj(avg);
  }

  Provenance prov;
  prov.mode = SurrogateMode::shots;
  prov.shots_per_point = budget.shots_per_point;
  prov.epsilon = budget.epsilon;
  prov.delta = budget.delta;
  prov.model_hash = model_hash(spec, theta);
  prov.certificate_valid = false;
  if (budget.epsilon > 0.0 && budget.delta > 0.0 && budget.delta < 1.0) {
    const double required =
        shot_budget_raw(budget.epsilon, budget.delta, total, norm);
    prov.certificate_valid =
        static_cast<double>(budget.shots_per_point) >= required;
  }
  return FourierSurrogate{std::move(freq), std::move(values), prov};
}

namespace {

Complex evaluate_complex(const FourierSurrogate& s, const Eigen::VectorXd& x) {
  const FrequencySet& freq = s.freq;
  const int d = freq.d();
  const auto sizes = freq.grid_sizes();
  std::vector<Eigen::VectorXcd> table(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const int w = freq.per_feature_max()[static_cast<std::size_t>(a)];
    auto& col = table[static_cast<std::size_t>(a)];
    col.resize(2 * w + 1);
    for (int dig = 0; dig < 2 * w + 1; ++dig)
      col(dig) = std::exp(Complex(0.0, -(dig - w) * x(a)));
  }
  // Odometer over lattice digits with running prefix products keeps the
  // sweep at O(T) complex multiplies.
  std::vector<int> digit(static_cast<std::size_t>(d), 0);
  std::vector<Complex> prefix(static_cast<std::size_t>(d) + 1);
  prefix[0] = Complex(1.0, 0.0);
  for (int a = 0; a < d; ++a)
    prefix[static_cast<std::size_t>(a) + 1] =
        prefix[static_cast<std::size_t>(a)] *
        table[static_cast<std::size_t>(a)](0);
  Complex acc(0.0, 0.0);
  const std::int64_t total = freq.size();
  for (std::int64_t k = 0;;) {
    acc += prefix[static_cast<std::size_t>(d)] * s.coefficients(k);
    if (++k == total) break;
    int a = d - 1;
    while (true) {
      auto& dig = digit[static_cast<std::size_t>(a)];
      if (++dig < static_cast<int>(sizes[static_cast<std::size_t>(a)])) break;
      dig = 0;
      --a;
    }
    for (; a < d; ++a)
      prefix[static_cast<std::size_t>(a) + 1] =
          prefix[static_cast<std::size_t>(a)] *
          table[static_cast<std::size_t>(a)](
              digit[static_cast<std::size_t>(a)]);
  }
  return acc;
}

}  // namespace

double evaluate_surrogate(const FourierSurrogate& s,
                          const Eigen::VectorXd& x) {
  if (x.size() != s.freq.d())
    throw argument_error("input has wrong dimension");
  if (s.coefficients.size() != s.freq.size())
    throw argument_error("coefficient vector has wrong length");
  return evaluate_complex(s, x).real();
}

double sup_error_estimate(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const FourierSurrogate& g, int probe_points_per_dim, std::uint64_t seed,
    int jobs) {
  const int d = g.freq.d();
  int per_dim = probe_points_per_dim;
  if (per_dim <= 0) per_dim = d <= 2 ? 256 : (d == 3 ? 32 : 0);

  std::vector<Eigen::VectorXd> points;
  std::int64_t dense_count = 0;
  if (per_dim > 0) {
    double total = 1.0;
    for (int a = 0; a < d; ++a) total *= per_dim;
    if (total <= 1e6) dense_count = static_cast<std::int64_t>(total);
  }
  if (dense_count > 0) {
    // Half-step offset keeps the probe grid disjoint from the (odd-sized)
    // reconstruction grid, so exactness is checked off the data points.
    points.reserve(static_cast<std::size_t>(2 * dense_count));
    std::vector<int> digit(static_cast<std::size_t>(d), 0);
    for (std::int64_t k = 0; k < dense_count; ++k) {
      Eigen::VectorXd x(d);
      for (int a = 0; a < d; ++a)
        x(a) = 2.0 * std::numbers::pi *
               (digit[static_cast<std::size_t>(a)] + 0.5) / per_dim;
      points.push_back(std::move(x));
      for (int a = d - 1; a >= 0; --a) {
        auto& dig = digit[static_cast<std::size_t>(a)];
        if (++dig < per_dim) break;
        dig = 0;
      }
    }
  } else {
    dense_count = 10'000;
    points.reserve(static_cast<std::size_t>(2 * dense_count));
    Rng rng(derive_seed(seed, "sup-probe-dense"));
    for (std::int64_t k = 0; k < dense_count; ++k) {
      Eigen::VectorXd x(d);
      for (int a = 0; a < d; ++a)
        x(a) = rng.uniform(0.0, 2.0 * std::numbers::pi);
      points.push_back(std::move(x));
    }
  }
  Rng rng(derive_seed(seed, "sup-probe-random"));
  for (std::int64_t k = 0; k < dense_count; ++k) {
    Eigen::VectorXd x(d);
    for (int a = 0; a < d; ++a)
      x(a) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    points.push_back(std::move(x));
  }

  std::mutex mu;
  double worst = 0.0;
  parallel_for(static_cast<std::int64_t>(points.size()), jobs,
               [&](std::int64_t begin, std::int64_t end) {
                 double local = 0.0;
                 for (std::int64_t k = begin; k < end; ++k) {
                   const auto& x = points[static_cast<std::size_t>(k)];
                   local = std::max(
                       local, std::abs(f(x) - evaluate_surrogate(g, x)));
                 }
                 std::lock_guard<std::mutex> lock(mu);
                 worst = std::max(worst, local);
               });
  return worst;
}

double sup_error_estimate(const ModelSpec& spec, const Eigen::VectorXd& theta,
                          const FourierSurrogate& g, std::uint64_t seed,
                          int jobs) {
  check_theta(spec, theta);
  return sup_error_estimate(
      [&](const Eigen::VectorXd& x) { return evaluate_exact(spec, theta, x); },
      g, 0, seed, jobs);
}

namespace {

std::string hash_to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::uint64_t hash_from_hex(const std::string& text) {
  if (text.empty()) return 0;
  return std::stoull(text, nullptr, 16);
}

}  // namespace

std::string surrogate_to_json(const FourierSurrogate& s) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["d"] = s.freq.d();
  j["per_feature_max"] = s.freq.per_feature_max();
  j["provenance"] = {
      {"mode", s.provenance.mode == SurrogateMode::exact ? "exact" : "shots"},
      {"shots_per_point", s.provenance.shots_per_point},
      {"epsilon", s.provenance.epsilon},
      {"delta", s.provenance.delta},
      {"certificate_valid", s.provenance.certificate_valid},
      {"model_hash", hash_to_hex(s.provenance.model_hash)},
  };
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index k = 0; k < s.coefficients.size(); ++k)
    coeffs.push_back({s.coefficients(k).real(), s.coefficients(k).imag()});
  j["coefficients"] = std::move(coeffs);
  return j.dump(2);
}

FourierSurrogate surrogate_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid surrogate JSON: ") + e.what());
  }
  try {
    if (j.value("schema_version", 1) != 1)
      throw parse_error("unsupported surrogate schema version");
    FrequencySet freq = FrequencySet::from_maxima(
        j.at("per_feature_max").get<std::vector<int>>());
    const auto& coeffs = j.at("coefficients");
    if (static_cast<std::int64_t>(coeffs.size()) != freq.size())
      throw parse_error("coefficient count does not match the lattice");
    Eigen::VectorXcd c(freq.size());
    for (std::int64_t k = 0; k < freq.size(); ++k) {
      const auto& pair = coeffs.at(static_cast<std::size_t>(k));
      c(k) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    Provenance prov;
    if (j.contains("provenance")) {
      const auto& p = j.at("provenance");
      prov.mode = p.value("mode", std::string("exact")) == "shots"
                      ? SurrogateMode::shots
                      : SurrogateMode::exact;
      prov.shots_per_point = p.value("shots_per_point", std::int64_t{0});
      prov.epsilon = p.value("epsilon", 0.0);
      prov.delta = p.value("delta", 0.0);
      prov.certificate_valid = p.value("certificate_valid", true);
      prov.model_hash = hash_from_hex(p.value("model_hash", std::string()));
    }
    return FourierSurrogate{std::move(freq), std::move(c), prov};
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid surrogate JSON: ") + e.what());
  }
}

void save_surrogate(const FourierSurrogate& s, const std::string& path) {
  write_file_atomic(path, surrogate_to_json(s));
}

FourierSurrogate load_surrogate(const std::string& path) {
  return surrogate_from_json(read_file(path));
}

}  // namespace qsurr
