#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "railcal/error.hpp"
#include "railcal/harness.hpp"
#include "railcal/sim.hpp"

using namespace railcal;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kFault = 2;

// Flags shared by the run subcommands; applied over the config file.
struct RunFlags {
  std::string config;
  std::string scenario;
  std::string algorithms;
  int budget = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
  std::string data;
  std::string dataset;
  std::uint64_t sim_seed = 0;
  std::uint64_t eval_seed = 0;
  std::vector<std::string> set;

  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool with_algorithms) {
    opts["config"] = app->add_option("--config", config, "key = value run configuration file");
    opts["scenario"] = app->add_option("--scenario", scenario, "scenario preset name or scenario file");
    if (with_algorithms) {
      opts["algorithms"] = app->add_option("--algorithms", algorithms, "comma-separated list, or 'all'");
    }
    opts["budget"] = app->add_option("--budget", budget, "objective calls per run");
    opts["replications"] = app->add_option("--replications", replications, "seeded runs per algorithm");
    opts["seed"] = app->add_option("--seed", seed, "base optimizer seed; replication r uses seed + r");
    opts["workers"] = app->add_option("--workers", workers, "parallel runs");
    opts["out"] = app->add_option("--out", out, "output directory");
    opts["data"] = app->add_option("--data", data, "fixture directory (default: built-in desk network)");
    opts["dataset"] = app->add_option("--dataset", dataset, "dataset directory written by 'generate'");
    opts["sim-seed"] = app->add_option("--sim-seed", sim_seed, "simulation seed for generation and evaluation");
    opts["eval-seed"] = app->add_option("--eval-seed", eval_seed, "evaluate with this seed instead of the dataset's");
    opts["set"] = app->add_option("--set", set, "extra key=value settings, e.g. --set w2=500");
  }

  bool given(const char* name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  harness::RunConfig resolve() const {
    harness::RunConfig c;
    if (given("config")) c = harness::load_config(config);
    if (given("scenario")) c.scenario = scenario;
    if (given("algorithms")) c.algorithms = harness::parse_algorithms(algorithms);
    if (given("budget")) c.budget = budget;
    if (given("replications")) c.replications = replications;
    if (given("seed")) c.seed = seed;
    if (given("workers")) c.workers = workers;
    if (given("out")) c.out = out;
    if (given("data")) c.data = data;
    if (given("dataset")) c.dataset = dataset;
    if (given("sim-seed")) c.sim_seed = sim_seed;
    if (given("eval-seed")) c.eval_seed = eval_seed;
    for (const auto& kv : set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      harness::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    harness::validate(c);
    return c;
  }
};

void print_progress(const harness::CellResult& r) {
  double wall = 0.0;
  for (const auto& e : r.result.trace.evaluations) wall += e.wall_seconds;
  std::fprintf(stderr, "%-5s rep %d seed %llu: best Z = %.6g after %zu calls (%.1f s)\n",
               std::string(optim::algorithm_name(r.cell.algorithm)).c_str(), r.cell.replication,
               static_cast<unsigned long long>(r.cell.seed), r.result.best_value, r.objective_calls, wall);
}

void print_estimates(const harness::ResultBundle& b) {
  std::ostringstream s;
  harness::write_estimates(s, b);
  std::cout << s.str();
}

harness::ResultBundle run_and_report(const harness::RunConfig& config, bool quiet) {
  const auto setup = harness::make_setup(config);
  std::fprintf(stderr, "scenario %s: %lld passengers, %zu observed exits\n", setup.dataset.scenario.name.c_str(),
               static_cast<long long>(setup.dataset.demand_count), setup.dataset.afc.size());
  auto bundle = harness::run_experiment(config, setup, quiet ? harness::Progress{} : print_progress);
  harness::write_report(bundle, setup.dataset);
  return bundle;
}

int cmd_fixture(const std::string& out, std::uint64_t seed, double scale) {
  synth::DeskOptions o;
  o.seed = seed;
  o.demand_scale = scale;
  const auto fx = synth::build_desk_fixture(o);
  synth::write_fixture(fx, out);
  std::printf("wrote %s: %zu stations, %zu paths, %zu passengers\n", out.c_str(), fx.network.stations().size(),
              fx.network.path_count(), fx.demand.size());
  return kOk;
}

int cmd_generate(const harness::RunConfig& c) {
  const auto fx = c.data.empty() ? synth::build_desk_fixture() : synth::load_fixture(c.data);
  const auto events = build_event_list(fx.network, fx.timetable);
  const auto ds =
      synth::generate(fx, events, synth::resolve_scenario(c.scenario), c.sim_seed, c.metrics, c.gamma_cf);
  synth::write_dataset(ds, fx, c.data, c.out);
  std::printf("wrote %s: scenario %s, %zu of %lld passengers exited\n", c.out.string().c_str(),
              ds.scenario.name.c_str(), ds.afc.size(), static_cast<long long>(ds.demand_count));
  return kOk;
}

int cmd_simulate(const harness::RunConfig& c) {
  const auto fx = c.data.empty() ? synth::build_desk_fixture() : synth::load_fixture(c.data);
  const auto events = build_event_list(fx.network, fx.timetable);
  const auto sc = synth::resolve_scenario(c.scenario);
  const auto sim = simulate(fx.network, events, fx.demand, choice_params(sc.theta, c.gamma_cf),
                            capacity_params(sc.theta), c.sim_seed, fx.period);
  fs::create_directories(c.out);
  std::ofstream p(c.out / "passengers.csv", std::ios::binary), l(c.out / "loads.csv", std::ios::binary);
  write_passenger_csv(p, fx.network, fx.demand, sim);
  write_load_csv(l, fx.network, events, sim);
  std::printf("wrote %s/passengers.csv and loads.csv\n", c.out.string().c_str());
  return kOk;
}

int cmd_compare(harness::RunConfig c, bool quiet) {
  if (c.dataset.empty()) {
    // keep a copy of the observations next to the results
    const auto setup = harness::make_setup(c);
    synth::write_dataset(setup.dataset, setup.fixture, c.data, c.out / "dataset");
  }
  const auto b = run_and_report(c, quiet);
  print_estimates(b);
  std::fprintf(stderr, "results in %s\n", c.out.string().c_str());
  return kOk;
}

int cmd_report(const std::string& dir) {
  auto b = harness::read_report(dir);
  if (b.cells.empty()) {
    std::printf("no runs recorded in %s\n", dir.c_str());
    return kOk;
  }
  {
    std::ofstream out(fs::path(dir) / "convergence.csv", std::ios::binary);
    harness::write_convergence(out, b);
  }
  {
    std::ofstream out(fs::path(dir) / "estimates.csv", std::ios::binary);
    harness::write_estimates(out, b);
  }
  std::printf("scenario %s, Z at start %.6g\n", b.scenario.c_str(), b.start_value);
  for (auto a : b.config.algorithms) {
    const auto curve = harness::convergence_curve(b, a);
    if (curve.empty()) continue;
    std::printf("%-5s final mean best %.6g  sd %.6g  (%zu runs)\n", std::string(optim::algorithm_name(a)).c_str(),
                curve.back().mean, curve.back().sd, curve.back().runs);
  }
  print_estimates(b);
  return kOk;
}

int cmd_verify(const std::string& dir, const std::string& scratch) {
  auto c = harness::load_config(fs::path(dir) / "run_config.txt");
  const auto recorded = harness::manifest_digests(dir);
  c.out = scratch.empty() ? fs::path(dir) / "verify" : fs::path(scratch);
  run_and_report(c, true);
  const auto fresh = harness::manifest_digests(c.out);
  int bad = 0;
  for (const auto& name : harness::deterministic_outputs()) {
    std::string a, b;
    for (const auto& [k, v] : recorded)
      if (k == name) a = v;
    for (const auto& [k, v] : fresh)
      if (k == name) b = v;
    if (a.empty() && b.empty()) continue;
    const bool same = a == b;
    bad += !same;
    std::printf("%-16s %s %s %s\n", name.c_str(), a.c_str(), same ? "==" : "!=", b.c_str());
  }
  std::printf(bad ? "MISMATCH\n" : "reproduced\n");
  return bad ? kFault : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rail network loading simulator and calibrator"};
  app.require_subcommand(1);

  auto* fixture = app.add_subcommand("fixture", "write the bundled desk network, timetable and demand");
  std::string fixture_out = "data/desk";
  std::uint64_t fixture_seed = synth::DeskOptions{}.seed;
  double fixture_scale = 1.0;
  fixture->add_option("--out", fixture_out, "output directory")->capture_default_str();
  fixture->add_option("--seed", fixture_seed, "demand seed")->capture_default_str();
  fixture->add_option("--demand-scale", fixture_scale, "demand multiplier")->capture_default_str();

  RunFlags gen_flags, sim_flags, cal_flags, cmp_flags;
  auto* generate = app.add_subcommand("generate", "simulate a synthetic AFC dataset at a scenario's parameters");
  gen_flags.add(generate, false);
  auto* simulate_cmd = app.add_subcommand("simulate", "run one simulation and write passenger and load tables");
  sim_flags.add(simulate_cmd, false);

  auto* calibrate = app.add_subcommand("calibrate", "calibrate with one algorithm");
  std::string algorithm = "CORS";
  calibrate->add_option("--algorithm", algorithm, "GA, SA, NMSA, MADS, SPSA, BYO or CORS")->capture_default_str();
  cal_flags.add(calibrate, false);
  bool quiet = false;
  calibrate->add_flag("--quiet", quiet, "no per-run progress");

  auto* compare = app.add_subcommand("compare", "replicated runs of several algorithms");
  cmp_flags.add(compare, true);
  compare->add_flag("--quiet", quiet, "no per-run progress");

  auto* report = app.add_subcommand("report", "summarise a results directory");
  std::string report_dir = "results";
  report->add_option("--out", report_dir, "results directory")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "rerun a results directory from its manifest and compare digests");
  std::string verify_dir = "results", verify_scratch;
  verify->add_option("--out", verify_dir, "results directory")->capture_default_str();
  verify->add_option("--scratch", verify_scratch, "where to write the rerun (default: <out>/verify)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (fixture->parsed()) return cmd_fixture(fixture_out, fixture_seed, fixture_scale);
    if (generate->parsed()) {
      auto c = gen_flags.resolve();
      if (!gen_flags.given("out") && !gen_flags.given("config")) c.out = "dataset";
      return cmd_generate(c);
    }
    if (simulate_cmd->parsed()) {
      auto c = sim_flags.resolve();
      if (!sim_flags.given("out") && !sim_flags.given("config")) c.out = "simulation";
      return cmd_simulate(c);
    }
    if (calibrate->parsed()) {
      auto c = cal_flags.resolve();
      c.algorithms = {optim::parse_algorithm(algorithm)};
      const auto b = run_and_report(c, quiet);
      print_estimates(b);
      return kOk;
    }
    if (compare->parsed()) return cmd_compare(cmp_flags.resolve(), quiet);
    if (report->parsed()) return cmd_report(report_dir);
    if (verify->parsed()) return cmd_verify(verify_dir, verify_scratch);
  } catch (const railcal::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kFault;
  }
  return kFault;
}
