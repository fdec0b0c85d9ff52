// Microbenchmarks for the hot paths: gate kernels across register widths,
// model evaluation, surrogate extraction, the grid least-squares solve,
// and concentration trial throughput.

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "qsurr/dataset.hpp"
#include "qsurr/fourier_model.hpp"
#include "qsurr/guarantees.hpp"
#include "qsurr/model.hpp"
#include "qsurr/rng.hpp"
#include "qsurr/spectrum.hpp"
#include "qsurr/statevector.hpp"
#include "qsurr/surrogate.hpp"

namespace {

using namespace qsurr;

void bm_gate_rx(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  StateVector psi = StateVector::zero_state(n);
  const Gate gate = Gate::rx(0.7, n / 2);
  for (auto _ : state) {
    apply_gate_in_place(psi, gate);
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * psi.dim());
}
BENCHMARK(bm_gate_rx)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

void bm_gate_rot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  StateVector psi = StateVector::zero_state(n);
  const Gate gate = Gate::rot(0.3, 1.1, -0.4, n / 2);
  for (auto _ : state) {
    apply_gate_in_place(psi, gate);
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * psi.dim());
}
BENCHMARK(bm_gate_rot)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

void bm_gate_cnot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  StateVector psi = StateVector::zero_state(n);
  const Gate gate = Gate::cnot(0, n - 1);
  for (auto _ : state) {
    apply_gate_in_place(psi, gate);
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * psi.dim());
}
BENCHMARK(bm_gate_cnot)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

void bm_expectation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  StateVector psi = StateVector::zero_state(n);
  apply_gate_in_place(psi, Gate::rx(0.9, 0));
  const Observable obs = Observable::z_on_qubit(0, n);
  for (auto _ : state) benchmark::DoNotOptimize(expectation(psi, obs));
}
BENCHMARK(bm_expectation)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

void bm_evaluate_exact(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int L = static_cast<int>(state.range(1));
  const ModelSpec spec(d, L, 2);
  const Eigen::VectorXd theta = random_parameters(spec, 3);
  Rng rng(4);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform(0.0, 2.0 * M_PI);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_exact(spec, theta, x));
}
BENCHMARK(bm_evaluate_exact)->Args({1, 3})->Args({2, 2})->Args({4, 2})->Args({8, 2});

void bm_parameter_shift(benchmark::State& state) {
  const ModelSpec spec(2, 2, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 5);
  Eigen::VectorXd x(2);
  x << 1.2, 4.5;
  for (auto _ : state) {
    Eigen::VectorXd g = gradient_parameter_shift(spec, theta, x);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(bm_parameter_shift);

void bm_surrogate_exact(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int L = static_cast<int>(state.range(1));
  const ModelSpec spec(d, L, 2);
  const Eigen::VectorXd theta = random_parameters(spec, 6);
  for (auto _ : state) {
    FourierSurrogate s = surrogate_exact(spec, theta);
    benchmark::DoNotOptimize(s.coefficients.data());
  }
}
BENCHMARK(bm_surrogate_exact)->Args({1, 3})->Args({2, 2})->Args({3, 2});

void bm_linear_best_fit(benchmark::State& state) {
  const Dataset data = synthetic_regression(500, 2, 0.05, 9);
  const FrequencySet freq = FrequencySet::from_maxima({2, 2});
  for (auto _ : state) {
    auto [model, report] = linear_best_fit(data, freq);
    benchmark::DoNotOptimize(report.residual);
  }
}
BENCHMARK(bm_linear_best_fit);

void bm_estimate_with_shots(benchmark::State& state) {
  const ModelSpec spec(1, 2, 1);
  const Eigen::VectorXd theta = random_parameters(spec, 8);
  Eigen::VectorXd x(1);
  x << 2.2;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_with_shots(spec, theta, x, 1000, seed++));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_estimate_with_shots);

void bm_concentration_trials(benchmark::State& state) {
  const std::vector<double> alphas{1.0, 3.0, 5.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    ConcentrationTable table =
        concentration_experiment(25, 100, 1.0, alphas, 1000, seed++);
    benchmark::DoNotOptimize(table.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_concentration_trials);

}  // namespace

BENCHMARK_MAIN();
