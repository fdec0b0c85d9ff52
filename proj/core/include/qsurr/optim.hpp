#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace qsurr {

enum class OptimMethod { quasi_newton_wolfe, gradient_descent };

/// Full-batch training settings. quasi_newton_wolfe is a bounded-history
/// quasi-Newton method with a strong Wolfe line search (c1, c2); every
/// accepted step is a descent step, so on convex objectives the loss is
/// non-increasing. gradient_descent takes one fixed-rate step per epoch.
struct OptimizerConfig {
  OptimMethod method = OptimMethod::quasi_newton_wolfe;
  int epochs = 200;
  int history = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  double learning_rate = 0.05;
  /// Stop when validation loss has not improved for `patience` epochs.
  /// Off by default: benchmarks record the validation curve instead of
  /// acting on it.
  bool early_stop_on_validation = false;
  int patience = 10;
};

std::string optimizer_config_to_json(const OptimizerConfig& config);
OptimizerConfig optimizer_config_from_json(std::string_view text);

/// Per-epoch mean squared errors. Entry 0 is the loss before any step, so
/// both curves have epochs + 1 entries; if the optimizer converges or
/// stalls early, the remaining entries repeat the last value and
/// epochs_run records the number of real steps.
struct LossTrace {
  std::vector<double> train;
  std::vector<double> val;
  int epochs_run = 0;
};

std::string loss_trace_to_csv(const LossTrace& trace);

/// Objective callback: returns the loss at x and, when grad is non-null,
/// writes the gradient into it.
using Objective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

/// Minimizes the objective in place and returns the loss trace. The
/// optional validation callback is evaluated at epoch 0 and after every
/// step. A non-finite loss or gradient raises optimizer_error with the
/// epoch in the message.
LossTrace minimize(const Objective& objective, Eigen::VectorXd& x,
                   const OptimizerConfig& config,
                   const std::function<double(const Eigen::VectorXd&)>&
                       validation = nullptr);

}  // namespace qsurr
