// Command line front end: spectrum inspection, surrogate extraction with
// certificates, statistical guarantee checks, training benchmarks, and
// concentration experiments. Every run that writes artifacts also writes a
// manifest sufficient to re-execute it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsurr/dataset.hpp"
#include "qsurr/errors.hpp"
#include "qsurr/fourier_model.hpp"
#include "qsurr/guarantees.hpp"
#include "qsurr/io.hpp"
#include "qsurr/model.hpp"
#include "qsurr/optim.hpp"
#include "qsurr/parallel.hpp"
#include "qsurr/rng.hpp"
#include "qsurr/spectrum.hpp"
#include "qsurr/surrogate.hpp"
#include "qsurr/training_bench.hpp"
#include "qsurr/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;
constexpr int kExitPropertyViolation = 4;

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

/// Collects a run's outputs and writes them plus a manifest under out_dir.
class ArtifactWriter {
 public:
  ArtifactWriter(std::string command, std::filesystem::path out_dir)
      : command_(std::move(command)),
        out_dir_(std::move(out_dir)),
        started_at_(utc_timestamp()),
        start_clock_(std::chrono::steady_clock::now()) {}

  void add(const std::string& relative_path, std::string_view content) {
    qsurr::write_file_atomic((out_dir_ / relative_path).string(), content);
    artifacts_.push_back(relative_path);
  }

  void note_input(const std::string& path, const std::string& content) {
    inputs_[path] = hex64(qsurr::fnv1a(content));
  }

  /// Wall-clock fields live only here, so the data artifacts above stay
  /// byte-identical across repeated runs.
  void finish(const nlohmann::json& config, std::uint64_t seed, int jobs) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_clock_)
            .count();
    nlohmann::json manifest{
        {"schema_version", 1},
        {"tool_version", qsurr::kVersion},
        {"command", command_},
        {"config", config},
        {"master_seed", seed},
        {"jobs", jobs},
        {"artifacts", artifacts_},
        {"input_hashes", inputs_},
        {"started_at", started_at_},
        {"duration_seconds", seconds},
    };
    qsurr::write_file_atomic((out_dir_ / "manifest.json").string(),
                             manifest.dump(2));
  }

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  std::string started_at_;
  std::chrono::steady_clock::time_point start_clock_;
  std::vector<std::string> artifacts_;
  nlohmann::json inputs_ = nlohmann::json::object();
};

struct LoadedModel {
  qsurr::ModelConfig config;
  Eigen::VectorXd theta;
  std::string config_text;
  std::string theta_text;  // empty when theta came from the config seed
};

LoadedModel load_model(const std::string& config_path,
                       const std::string& theta_path) {
  LoadedModel loaded{
      .config = qsurr::ModelConfig{qsurr::ModelSpec(1, 1, 1), 0},
      .theta = {},
      .config_text = qsurr::read_file(config_path),
      .theta_text = {},
  };
  loaded.config = qsurr::model_config_from_json(loaded.config_text);
  if (theta_path.empty()) {
    loaded.theta =
        qsurr::random_parameters(loaded.config.spec, loaded.config.seed);
  } else {
    loaded.theta_text = qsurr::read_file(theta_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(loaded.theta_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw qsurr::parse_error(std::string("invalid theta JSON: ") + e.what());
    }
    const nlohmann::json& array = j.is_object() ? j.at("theta") : j;
    if (!array.is_array())
      throw qsurr::parse_error("theta file must hold an array of angles");
    loaded.theta.resize(static_cast<Eigen::Index>(array.size()));
    for (Eigen::Index i = 0; i < loaded.theta.size(); ++i)
      loaded.theta(i) = array.at(static_cast<std::size_t>(i)).get<double>();
    if (loaded.theta.size() != loaded.config.spec.parameter_count())
      throw qsurr::argument_error(
          "theta has " + std::to_string(loaded.theta.size()) +
          " angles, the model needs " +
          std::to_string(loaded.config.spec.parameter_count()));
  }
  return loaded;
}

int cmd_spectrum(const std::string& config_path, bool as_json,
                 const std::string& out_dir) {
  const std::string config_text = qsurr::read_file(config_path);
  const qsurr::ModelConfig config =
      qsurr::model_config_from_json(config_text);
  const qsurr::FrequencySet freq =
      qsurr::FrequencySet::for_model(config.spec);
  const std::string freq_json = qsurr::frequency_set_to_json(freq);

  nlohmann::json j = nlohmann::json::parse(freq_json);
  j["grid_sizes"] = freq.grid_sizes();
  j["T"] = freq.size();
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "d: " << freq.d() << "\n";
    std::cout << "omega_max:";
    for (int w : freq.per_feature_max()) std::cout << ' ' << w;
    std::cout << "\ngrid_sizes:";
    for (std::int64_t t : freq.grid_sizes()) std::cout << ' ' << t;
    std::cout << "\nT: " << freq.size() << "\n";
  }
  if (!out_dir.empty()) {
    ArtifactWriter writer("spectrum", out_dir);
    writer.note_input(config_path, config_text);
    writer.add("spectrum.json", j.dump(2));
    writer.finish({{"model_config", config_path}, {"json", as_json}}, 0, 1);
  }
  return kExitOk;
}

int cmd_surrogate(const std::string& config_path,
                  const std::string& theta_path, const std::string& mode,
                  double epsilon, double delta, std::uint64_t seed, int jobs,
                  std::int64_t grid_cap, const std::string& out_dir) {
  const LoadedModel loaded = load_model(config_path, theta_path);
  const qsurr::ModelSpec& spec = loaded.config.spec;

  qsurr::FourierSurrogate surrogate =
      [&]() -> qsurr::FourierSurrogate {
    if (mode == "exact")
      return qsurr::surrogate_exact(spec, loaded.theta, jobs, grid_cap);
    const qsurr::SurrogationBudget budget =
        qsurr::shot_budget(epsilon, delta,
                           qsurr::FrequencySet::for_model(spec).size(),
                           spec.observable().operator_norm());
    return qsurr::surrogate_with_shots(spec, loaded.theta, budget, seed, jobs,
                                       grid_cap);
  }();

  const double sup_check = qsurr::sup_error_estimate(
      spec, loaded.theta, surrogate, qsurr::derive_seed(seed, "certificate"),
      jobs);
  const auto& prov = surrogate.provenance;
  nlohmann::json certificate{
      {"schema_version", 1},
      {"mode", mode},
      {"epsilon", prov.epsilon},
      {"delta", prov.delta},
      {"shots_per_point", prov.shots_per_point},
      {"total_shots", prov.shots_per_point * surrogate.freq.size()},
      {"grid_size", surrogate.freq.size()},
      {"observable_norm", spec.observable().operator_norm()},
      {"certificate_valid", prov.certificate_valid},
      {"model_hash", hex64(prov.model_hash)},
      {"sup_error_estimate", sup_check},
  };

  ArtifactWriter writer("surrogate", out_dir);
  writer.note_input(config_path, loaded.config_text);
  if (!loaded.theta_text.empty())
    writer.note_input(theta_path, loaded.theta_text);
  writer.add("surrogate.json", qsurr::surrogate_to_json(surrogate));
  writer.add("certificate.json", certificate.dump(2));
  writer.finish(
      {{"model_config", config_path},
       {"theta", theta_path},
       {"mode", mode},
       {"epsilon", epsilon},
       {"delta", delta},
       {"grid_cap", grid_cap}},
      seed, jobs);
  std::cout << "mode: " << mode << "\nT: " << surrogate.freq.size()
            << "\nshots_per_point: " << prov.shots_per_point
            << "\nsup_error_estimate: " << sup_check << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& theta_path,
               double epsilon, double delta, std::int64_t trials,
               const std::vector<std::int64_t>& budget_grid,
               std::uint64_t seed, int jobs, const std::string& out_dir) {
  const LoadedModel loaded = load_model(config_path, theta_path);
  const qsurr::TrialSummary summary = qsurr::recovery_trials(
      loaded.config.spec, loaded.theta, epsilon, delta, trials, seed, jobs);
  const qsurr::BudgetComparison budgets =
      qsurr::budget_comparison(epsilon, delta, budget_grid,
                               loaded.config.spec.observable().operator_norm());

  ArtifactWriter writer("verify", out_dir);
  writer.note_input(config_path, loaded.config_text);
  if (!loaded.theta_text.empty())
    writer.note_input(theta_path, loaded.theta_text);
  writer.add("recovery.json", qsurr::trial_summary_to_json(summary));
  writer.add("budget.csv", qsurr::budget_comparison_to_csv(budgets));
  writer.add("budget.json", qsurr::budget_comparison_to_json(budgets));
  writer.finish(
      {{"model_config", config_path},
       {"theta", theta_path},
       {"epsilon", epsilon},
       {"delta", delta},
       {"trials", trials},
       {"budget_grid", budget_grid}},
      seed, jobs);

  std::cout << "trials: " << summary.trials
            << "\nsuccesses: " << summary.successes << "\nempirical_rate: "
            << summary.empirical_rate << "\nbound_rate: "
            << summary.bound_rate << "\nwilson: [" << summary.wilson_low
            << ", " << summary.wilson_high << "]\n";
  if (!summary.meets_bound) {
    std::cerr << "property violated: empirical success rate "
              << summary.empirical_rate
              << " falls below the certified rate 1 - delta = "
              << summary.bound_rate << " beyond the confidence half-width\n";
    return kExitPropertyViolation;
  }
  if (!budgets.sub_linear_holds) {
    std::cerr << "property violated: surrogation/inference cost ratio per "
                 "grid size is not decreasing\n";
    return kExitPropertyViolation;
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, bool seed_given,
              std::uint64_t seed, int jobs, const std::string& out_dir) {
  const std::string config_text = qsurr::read_file(config_path);
  qsurr::BenchConfig config = qsurr::bench_config_from_json(config_text);
  if (seed_given) config.seed = seed;

  const qsurr::BenchmarkReport report = qsurr::run_benchmark(config, jobs);

  ArtifactWriter writer("bench", out_dir);
  writer.note_input(config_path, config_text);
  writer.add("report.json", qsurr::benchmark_report_to_json(report));
  writer.add("aggregate.csv", qsurr::aggregate_csv(report));
  for (const auto& result : report.results) {
    if (result.failed) continue;
    char name[160];
    std::snprintf(name, sizeof name, "runs/%s-run-%03d.csv",
                  result.model.c_str(), result.run);
    writer.add(name, qsurr::loss_trace_to_csv(result.trace));
  }
  writer.finish(
      {{"bench_config", config_path},
       {"resolved", nlohmann::json::parse(qsurr::bench_config_to_json(config))}},
      config.seed, jobs);

  int failed_cells = 0;
  for (const auto& result : report.results)
    if (result.failed) ++failed_cells;
  std::cout << "runs: " << config.runs << "\nmodels: "
            << config.models.size() << "\nfailed_cells: " << failed_cells
            << "\nlower_bound_holds: "
            << (report.lower_bound_holds ? "true" : "false") << "\n";
  if (!report.lower_bound_holds) {
    std::cerr << "property violated: direct least-squares residual must "
                 "lower-bound every final training loss\n";
    for (const auto& violation : report.violations)
      std::cerr << "  " << violation << "\n";
    return kExitPropertyViolation;
  }
  return kExitOk;
}

int cmd_concentration(std::int64_t dimension, std::int64_t samples,
                      double bound, double alpha_max, int alpha_points,
                      std::int64_t trials, const std::string& noise,
                      std::uint64_t seed, int jobs,
                      const std::string& out_dir) {
  if (alpha_max <= 0.0) {
    // Default range: twice the threshold where the closed-form bound
    // crosses 1, which brackets the informative region.
    alpha_max = 2.0 * bound * static_cast<double>(dimension) *
                std::sqrt(2.0 * std::log(2.0) / static_cast<double>(samples));
  }
  std::vector<double> alpha_grid;
  alpha_grid.reserve(static_cast<std::size_t>(alpha_points));
  for (int i = 0; i < alpha_points; ++i)
    alpha_grid.push_back(alpha_max * static_cast<double>(i) /
                         static_cast<double>(alpha_points - 1));
  const qsurr::NoiseKind kind = noise == "uniform"
                                    ? qsurr::NoiseKind::uniform
                                    : qsurr::NoiseKind::rademacher;
  const qsurr::ConcentrationTable table = qsurr::concentration_experiment(
      dimension, samples, bound, alpha_grid, trials, seed, kind, jobs);

  ArtifactWriter writer("concentration", out_dir);
  writer.add("concentration.csv", qsurr::concentration_table_to_csv(table));
  writer.add("concentration.json", qsurr::concentration_table_to_json(table));
  writer.finish(
      {{"T", dimension},
       {"N", samples},
       {"B", bound},
       {"alpha_max", alpha_max},
       {"alpha_points", alpha_points},
       {"trials", trials},
       {"noise", noise}},
      seed, jobs);

  std::cout << "alpha  empirical  l1_bound  hoeffding_bound\n";
  for (const auto& row : table.rows)
    std::printf("%-7.4f %-10.6f %-9.6f %-9.6f\n", row.alpha,
                row.empirical_tail, std::min(1.0, row.l1_bound),
                std::min(1.0, row.hoeffding_bound));
  if (!table.within_bound) {
    std::cerr << "property violated: empirical tail exceeds the closed-form "
                 "bound by more than 3 Monte-Carlo standard errors\n";
    return kExitPropertyViolation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier surrogates for re-uploading quantum models"};
  app.set_version_flag("--version", std::string(qsurr::kVersion));
  app.require_subcommand(1);

  // spectrum
  auto* spectrum = app.add_subcommand(
      "spectrum", "Print the accessible frequency lattice of a model");
  std::string sp_config;
  bool sp_json = false;
  std::string sp_out;
  spectrum->add_option("model-config", sp_config, "model config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  spectrum->add_flag("--json", sp_json, "emit JSON on stdout");
  spectrum->add_option("--out", sp_out, "artifact directory (optional)");

  // surrogate
  auto* surrogate = app.add_subcommand(
      "surrogate", "Extract a truncated Fourier surrogate with a certificate");
  std::string su_config, su_theta, su_mode = "exact", su_out = "qsurr-out";
  double su_epsilon = 0.1, su_delta = 0.01;
  std::uint64_t su_seed = 0;
  int su_jobs = 0;
  std::int64_t su_cap = qsurr::kDefaultGridCap;
  surrogate->add_option("model-config", su_config, "model config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  surrogate->add_option("--theta", su_theta,
                        "angles JSON (default: drawn from the config seed)");
  surrogate->add_option("--mode", su_mode, "exact | shots")
      ->check(CLI::IsMember({"exact", "shots"}));
  surrogate->add_option("--epsilon", su_epsilon, "sup-norm target (shots)");
  surrogate->add_option("--delta", su_delta, "failure probability (shots)");
  surrogate->add_option("--seed", su_seed, "master seed");
  surrogate->add_option("--jobs", su_jobs, "worker threads (0 = all cores)");
  surrogate->add_option("--grid-cap", su_cap, "largest allowed grid");
  surrogate->add_option("--out", su_out, "artifact directory");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Monte-Carlo check of the recovery guarantee and budgets");
  std::string ve_config, ve_theta, ve_out = "qsurr-out";
  double ve_epsilon = 0.3, ve_delta = 0.2;
  std::int64_t ve_trials = 50;
  std::vector<std::int64_t> ve_budget_grid{5, 25, 125};
  std::uint64_t ve_seed = 0;
  int ve_jobs = 0;
  verify->add_option("model-config", ve_config, "model config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--theta", ve_theta,
                     "angles JSON (default: drawn from the config seed)");
  verify->add_option("--epsilon", ve_epsilon, "sup-norm target");
  verify->add_option("--delta", ve_delta, "failure probability");
  verify->add_option("--trials", ve_trials, "number of reconstructions");
  verify->add_option("--budget-grid", ve_budget_grid,
                     "grid sizes for the cost comparison table");
  verify->add_option("--seed", ve_seed, "master seed");
  verify->add_option("--jobs", ve_jobs, "worker threads (0 = all cores)");
  verify->add_option("--out", ve_out, "artifact directory");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Train quantum models against the direct Fourier fit");
  std::string be_config, be_out = "qsurr-out";
  std::uint64_t be_seed = 0;
  int be_jobs = 0;
  bench->add_option("config", be_config, "benchmark config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  auto* be_seed_opt =
      bench->add_option("--seed", be_seed, "override the config seed");
  bench->add_option("--jobs", be_jobs, "worker threads (0 = all cores)");
  bench->add_option("--out", be_out, "artifact directory");

  // concentration
  auto* concentration = app.add_subcommand(
      "concentration", "Tabulate the l1 tail bound against simulation");
  std::int64_t co_T = 25, co_N = 100, co_trials = 20000;
  double co_B = 1.0, co_alpha_max = 0.0;
  int co_alpha_points = 20, co_jobs = 0;
  std::string co_noise = "rademacher", co_out = "qsurr-out";
  std::uint64_t co_seed = 0;
  concentration->add_option("--T", co_T, "vector dimension");
  concentration->add_option("--N", co_N, "samples per coordinate");
  concentration->add_option("--B", co_B, "sample bound");
  concentration->add_option("--alpha-max", co_alpha_max,
                            "largest threshold (0 = auto)");
  concentration->add_option("--alpha-points", co_alpha_points,
                            "grid resolution")
      ->check(CLI::Range(2, 10000));
  concentration->add_option("--trials", co_trials, "Monte-Carlo trials");
  concentration->add_option("--noise", co_noise, "rademacher | uniform")
      ->check(CLI::IsMember({"rademacher", "uniform"}));
  concentration->add_option("--seed", co_seed, "master seed");
  concentration->add_option("--jobs", co_jobs,
                            "worker threads (0 = all cores)");
  concentration->add_option("--out", co_out, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(sp_config, sp_json, sp_out);
    if (surrogate->parsed())
      return cmd_surrogate(su_config, su_theta, su_mode, su_epsilon, su_delta,
                           su_seed, su_jobs, su_cap, su_out);
    if (verify->parsed())
      return cmd_verify(ve_config, ve_theta, ve_epsilon, ve_delta, ve_trials,
                        ve_budget_grid, ve_seed, ve_jobs, ve_out);
    if (bench->parsed())
      return cmd_bench(be_config, be_seed_opt->count() > 0, be_seed, be_jobs,
                       be_out);
    if (concentration->parsed())
      return cmd_concentration(co_T, co_N, co_B, co_alpha_max,
                               co_alpha_points, co_trials, co_noise, co_seed,
                               co_jobs, co_out);
  } catch (const qsurr::property_violation& e) {
    std::cerr << "property violated: " << e.what() << "\n";
    return kExitPropertyViolation;
  } catch (const qsurr::resource_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const qsurr::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qsurr::argument_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
