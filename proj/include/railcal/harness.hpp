#pragma once

// Experiment runner: replicated calibrations of several algorithms against one
// synthetic dataset, with convergence curves, estimate tables and a manifest
// that is enough to rerun everything.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "railcal/metrics.hpp"
#include "railcal/optim.hpp"
#include "railcal/synth.hpp"

namespace railcal::harness {

struct RunConfig {
  std::string scenario = "reference";  // preset name or scenario file
  std::vector<optim::Algorithm> algorithms{optim::kAllAlgorithms.begin(), optim::kAllAlgorithms.end()};
  int budget = 100;
  int replications = 5;
  std::uint64_t seed = 1;  // replication r uses seed + r
  int workers = 1;
  std::filesystem::path out = "results";
  std::filesystem::path data;     // fixture directory; empty = built-in desk fixture
  std::filesystem::path dataset;  // empty = simulate observations at the scenario's theta
  std::uint64_t sim_seed = 1;     // generation seed, reused for every evaluation
  std::optional<std::uint64_t> eval_seed;  // evaluate with a different seed than the data was made with
  double gamma_cf = 1.0;
  MetricsConfig metrics;
  optim::OptimizerConfig optimizer;  // hyperparameters; algorithm, budget and seed are per cell
};

/// Sets one key. Throws ConfigError naming the key for bad values or unknown keys.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
/// `key = value` lines with '#' comments, applied on top of `base`.
RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& file, RunConfig base = {});
/// Every key with its effective value, in a fixed order. Feeding the pairs
/// back through apply_setting reproduces the configuration.
std::vector<std::pair<std::string, std::string>> echo(const RunConfig& config);
void write_config(std::ostream& out, const RunConfig& config);
/// Throws ConfigError for budgets, replication or worker counts below one,
/// an empty algorithm list, or invalid metric settings.
void validate(const RunConfig& config);

std::string join_algorithms(const std::vector<optim::Algorithm>& algorithms);
std::vector<optim::Algorithm> parse_algorithms(std::string_view list);

// ---------------------------------------------------------------------------

/// Fixture, dataset and objective context for one configuration.
struct Setup {
  synth::Fixture fixture;
  synth::SyntheticDataset dataset;
  std::shared_ptr<const CalibrationContext> context;
};

/// Loads or builds the fixture, then loads the dataset named by the config or
/// generates one in memory. A named dataset that is missing raises a
/// ConfigError telling the user how to create it.
Setup make_setup(const RunConfig& config);

struct Cell {
  optim::Algorithm algorithm = optim::Algorithm::CORS;
  int replication = 0;
  std::uint64_t seed = 0;
  bool deterministic = false;
};

/// One cell per algorithm and replication, algorithms in config order.
/// Deterministic algorithms get a single cell.
std::vector<Cell> plan_cells(const RunConfig& config);

struct CellResult {
  Cell cell;
  optim::OptimizeResult result;
  std::size_t objective_calls = 0;  // counted outside the optimizer
};

struct ResultBundle {
  RunConfig config;
  std::string scenario;
  std::vector<std::string> param_names;
  std::optional<std::vector<double>> theta_true;
  std::optional<double> true_value;  // objective at theta_true
  std::vector<double> start;
  double start_value = 0.0;
  std::vector<CellResult> cells;  // plan order
};

using Progress = std::function<void(const CellResult&)>;

/// Runs every cell of the plan on up to config.workers threads. Results come
/// back in plan order regardless of scheduling.
ResultBundle run_cells(const RunConfig& config, const optim::Objective& objective, const Bounds& bounds,
                       std::vector<double> start, const Progress& progress = {});

/// Calibration from the midpoint of the scenario bounds.
ResultBundle run_experiment(const RunConfig& config, const Setup& setup, const Progress& progress = {});

// ---------------------------------------------------------------------------

struct CurvePoint {
  std::size_t eval_index = 0;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t runs = 0;
};

/// Mean and standard deviation of best-so-far across the algorithm's
/// replications at each call count. Shorter traces carry their last value
/// forward.
std::vector<CurvePoint> convergence_curve(const ResultBundle& bundle, optim::Algorithm algorithm);
/// Index into bundle.cells of the algorithm's lowest final objective.
std::optional<std::size_t> best_cell(const ResultBundle& bundle, optim::Algorithm algorithm);

void write_traces(std::ostream& out, const ResultBundle& bundle);
void write_eval_log(std::ostream& out, const ResultBundle& bundle);
void write_convergence(std::ostream& out, const ResultBundle& bundle);
void write_estimates(std::ostream& out, const ResultBundle& bundle);
void write_summary(std::ostream& out, const ResultBundle& bundle);

/// Files whose bytes depend only on the configuration.
std::vector<std::string> deterministic_outputs();

/// Writes the report into bundle.config.out: traces.csv, eval_log.csv,
/// convergence.csv, estimates.csv, summary.csv, run_config.txt and
/// manifest.json. An empty bundle produces the config and manifest only.
void write_report(const ResultBundle& bundle, const std::optional<synth::SyntheticDataset>& dataset = {});

/// Rebuilds a bundle from a report directory (run_config.txt, manifest.json,
/// traces.csv). Wall times are not recovered.
ResultBundle read_report(const std::filesystem::path& dir);

/// Output file name to digest, as recorded in manifest.json.
std::vector<std::pair<std::string, std::string>> manifest_digests(const std::filesystem::path& dir);

}  // namespace railcal::harness
