#include "qsurr/optim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <string>

#include <json.hpp>

#include "qsurr/errors.hpp"

namespace qsurr {

namespace {

constexpr const char* kQuasiNewtonName = "quasi-newton-wolfe";
constexpr const char* kGradientDescentName = "gradient-descent";

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void check_finite(double loss, const Eigen::VectorXd& grad, int epoch) {
  if (!std::isfinite(loss))
    throw optimizer_error("non-finite loss " + format_double(loss) +
                          " at epoch " + std::to_string(epoch));
  if (!grad.allFinite())
    throw optimizer_error("non-finite gradient at epoch " +
                          std::to_string(epoch));
}

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative g . p
  Eigen::VectorXd x;
  Eigen::VectorXd g;
};

/// Strong Wolfe line search along p from (x0, f0, g0). Returns true and
/// fills `out` with an accepted point; false when no acceptable step
/// exists within the iteration caps (stall).
bool line_search_strong_wolfe(const Objective& objective,
                              const Eigen::VectorXd& x0, double f0,
                              const Eigen::VectorXd& g0,
                              const Eigen::VectorXd& p, double c1, double c2,
                              double alpha_init, int epoch, LinePoint& out) {
  const double slope0 = g0.dot(p);
  if (!(slope0 < 0.0)) return false;

  auto probe = [&](double alpha, LinePoint& pt) {
    pt.alpha = alpha;
    pt.x = x0 + alpha * p;
    pt.g.resize(x0.size());
    pt.f = objective(pt.x, &pt.g);
    check_finite(pt.f, pt.g, epoch);
    pt.slope = pt.g.dot(p);
  };

  auto zoom = [&](LinePoint lo, LinePoint hi) -> bool {
    for (int iter = 0; iter < 50; ++iter) {
      if (std::abs(hi.alpha - lo.alpha) <
          1e-16 * std::max(1.0, std::abs(hi.alpha)))
        break;
      LinePoint mid;
      probe(0.5 * (lo.alpha + hi.alpha), mid);
      if (mid.f > f0 + c1 * mid.alpha * slope0 || mid.f >= lo.f) {
        hi = std::move(mid);
      } else {
        if (std::abs(mid.slope) <= -c2 * slope0) {
          out = std::move(mid);
          return true;
        }
        if (mid.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(mid);
      }
    }
    // Curvature never satisfied inside the bracket; a sufficient-decrease
    // point still makes progress.
    if (lo.alpha > 0.0 && lo.f < f0) {
      out = std::move(lo);
      return true;
    }
    return false;
  };

  LinePoint prev;
  prev.alpha = 0.0;
  prev.f = f0;
  prev.slope = slope0;
  double alpha = alpha_init;
  for (int iter = 0; iter < 60; ++iter) {
    LinePoint cur;
    probe(alpha, cur);
    if (cur.f > f0 + c1 * alpha * slope0 || (iter > 0 && cur.f >= prev.f))
      return zoom(std::move(prev), std::move(cur));
    if (std::abs(cur.slope) <= -c2 * slope0) {
      out = std::move(cur);
      return true;
    }
    if (cur.slope >= 0.0) return zoom(std::move(cur), std::move(prev));
    prev = std::move(cur);
    alpha *= 2.0;
    if (!std::isfinite(alpha)) break;
  }
  if (prev.alpha > 0.0 && prev.f < f0) {
    out = std::move(prev);
    return true;
  }
  return false;
}

}  // namespace

std::string optimizer_config_to_json(const OptimizerConfig& config) {
  nlohmann::json j{
      {"method", config.method == OptimMethod::quasi_newton_wolfe
                     ? kQuasiNewtonName
                     : kGradientDescentName},
      {"epochs", config.epochs},
      {"history", config.history},
      {"wolfe_c1", config.wolfe_c1},
      {"wolfe_c2", config.wolfe_c2},
      {"learning_rate", config.learning_rate},
      {"early_stop_on_validation", config.early_stop_on_validation},
      {"patience", config.patience},
  };
  return j.dump(2);
}

OptimizerConfig optimizer_config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid optimizer JSON: ") + e.what());
  }
  try {
    OptimizerConfig config;
    const std::string method = j.value("method", std::string(kQuasiNewtonName));
    if (method == kQuasiNewtonName)
      config.method = OptimMethod::quasi_newton_wolfe;
    else if (method == kGradientDescentName)
      config.method = OptimMethod::gradient_descent;
    else
      throw parse_error("unknown optimizer method \"" + method + "\"");
    config.epochs = j.value("epochs", config.epochs);
    config.history = j.value("history", config.history);
    config.wolfe_c1 = j.value("wolfe_c1", config.wolfe_c1);
    config.wolfe_c2 = j.value("wolfe_c2", config.wolfe_c2);
    config.learning_rate = j.value("learning_rate", config.learning_rate);
    config.early_stop_on_validation =
        j.value("early_stop_on_validation", config.early_stop_on_validation);
    config.patience = j.value("patience", config.patience);
    if (config.epochs < 0) throw parse_error("epochs must be >= 0");
    if (config.history < 1) throw parse_error("history must be >= 1");
    if (!(config.wolfe_c1 > 0.0 && config.wolfe_c1 < config.wolfe_c2 &&
          config.wolfe_c2 < 1.0))
      throw parse_error("need 0 < wolfe_c1 < wolfe_c2 < 1");
    if (!(config.learning_rate > 0.0))
      throw parse_error("learning_rate must be positive");
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid optimizer JSON: ") + e.what());
  }
}

std::string loss_trace_to_csv(const LossTrace& trace) {
  std::string csv = trace.val.empty() ? "epoch,train_mse\n"
                                      : "epoch,train_mse,val_mse\n";
  for (std::size_t k = 0; k < trace.train.size(); ++k) {
    csv += std::to_string(k);
    csv += ',';
    csv += format_double(trace.train[k]);
    if (!trace.val.empty()) {
      csv += ',';
      csv += format_double(trace.val[k]);
    }
    csv += '\n';
  }
  return csv;
}

LossTrace minimize(const Objective& objective, Eigen::VectorXd& x,
                   const OptimizerConfig& config,
                   const std::function<double(const Eigen::VectorXd&)>&
                       validation) {
  if (config.epochs < 0) throw argument_error("epochs must be >= 0");
  LossTrace trace;
  trace.train.reserve(static_cast<std::size_t>(config.epochs) + 1);
  if (validation)
    trace.val.reserve(static_cast<std::size_t>(config.epochs) + 1);

  Eigen::VectorXd grad(x.size());
  double loss = objective(x, &grad);
  check_finite(loss, grad, 0);
  trace.train.push_back(loss);
  if (validation) trace.val.push_back(validation(x));

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;  // (s, y)
  double best_val = validation ? trace.val.back() : 0.0;
  int epochs_without_improvement = 0;
  bool stalled = false;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (!stalled) {
      if (config.method == OptimMethod::gradient_descent) {
        x -= config.learning_rate * grad;
        loss = objective(x, &grad);
        check_finite(loss, grad, epoch);
        trace.epochs_run = epoch;
      } else {
        // Two-loop recursion over the stored (s, y) pairs.
        Eigen::VectorXd q = grad;
        std::vector<double> alpha_cache(memory.size());
        for (std::size_t i = memory.size(); i-- > 0;) {
          const auto& [s, y] = memory[i];
          const double rho = 1.0 / y.dot(s);
          alpha_cache[i] = rho * s.dot(q);
          q -= alpha_cache[i] * y;
        }
        if (!memory.empty()) {
          const auto& [s, y] = memory.back();
          q *= s.dot(y) / y.dot(y);
        }
        for (std::size_t i = 0; i < memory.size(); ++i) {
          const auto& [s, y] = memory[i];
          const double rho = 1.0 / y.dot(s);
          const double beta = rho * y.dot(q);
          q += (alpha_cache[i] - beta) * s;
        }
        Eigen::VectorXd direction = -q;
        if (!(direction.dot(grad) < 0.0)) direction = -grad;

        const double gnorm = grad.norm();
        if (gnorm < 1e-14) {
          stalled = true;
        } else {
          const double alpha_init =
              memory.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
          LinePoint accepted;
          if (!line_search_strong_wolfe(objective, x, loss, grad, direction,
                                        config.wolfe_c1, config.wolfe_c2,
                                        alpha_init, epoch, accepted)) {
            stalled = true;
          } else {
            Eigen::VectorXd s = accepted.x - x;
            Eigen::VectorXd y = accepted.g - grad;
            const double sy = s.dot(y);
            if (sy > 1e-12 * s.norm() * y.norm()) {
              memory.emplace_back(std::move(s), std::move(y));
              if (static_cast<int>(memory.size()) > config.history)
                memory.pop_front();
            }
            x = std::move(accepted.x);
            grad = std::move(accepted.g);
            loss = accepted.f;
            trace.epochs_run = epoch;
          }
        }
      }
    }
    trace.train.push_back(loss);
    if (validation) {
      const double val = stalled ? trace.val.back() : validation(x);
      trace.val.push_back(val);
      if (config.early_stop_on_validation) {
        if (val < best_val - 1e-15) {
          best_val = val;
          epochs_without_improvement = 0;
        } else if (++epochs_without_improvement >= config.patience) {
          stalled = true;
        }
      }
    }
  }
  return trace;
}

}  // namespace qsurr
