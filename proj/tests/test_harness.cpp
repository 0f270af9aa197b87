#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "railcal/error.hpp"
#include "railcal/harness.hpp"

using namespace railcal;
using namespace railcal::harness;

namespace {

const Bounds kBox{{-5, -5, -5}, {5, 5, 5}};

double bowl(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += (v - 1) * (v - 1);
  return s;
}

RunConfig small_config(const std::filesystem::path& out) {
  RunConfig c;
  c.algorithms = {optim::Algorithm::GA, optim::Algorithm::NMSA, optim::Algorithm::CORS};
  c.budget = 25;
  c.replications = 3;
  c.out = out;
  return c;
}

ResultBundle bowl_bundle(const RunConfig& c) {
  auto b = run_cells(c, bowl, kBox, {4, -3, 2});
  b.scenario = "bowl";
  b.param_names = {"x", "y", "z"};
  b.theta_true = std::vector<double>{1, 1, 1};
  b.true_value = 0.0;
  return b;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config echo feeds back to the same configuration") {
  RunConfig c;
  apply_setting(c, "budget", "42");
  apply_setting(c, "algorithms", "cors,ga");
  apply_setting(c, "eval_seed", "9");
  apply_setting(c, "w2", "250.5");
  apply_setting(c, "cors.distance_cycle", "0.5 0.1 0");
  apply_setting(c, "sa.initial_temp", "1e3");
  const auto pairs = echo(c);
  RunConfig back;
  for (const auto& [k, v] : pairs) apply_setting(back, k, v);
  CHECK(echo(back) == pairs);
  CHECK(back.budget == 42);
  CHECK(back.algorithms == std::vector<optim::Algorithm>{optim::Algorithm::CORS, optim::Algorithm::GA});
  CHECK(back.eval_seed == std::optional<std::uint64_t>{9});
  CHECK(back.metrics.weights.w2 == 250.5);
  CHECK(back.optimizer.cors.distance_cycle == std::vector<double>{0.5, 0.1, 0});

  std::ostringstream text;
  write_config(text, c);
  std::istringstream in(text.str());
  CHECK(echo(parse_config(in, "run_config.txt")) == pairs);
}

TEST_CASE("config errors name the key or line") {
  RunConfig c;
  CHECK_THROWS_AS(apply_setting(c, "budgett", "3"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "budget", "three"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "algorithms", "cors,annealing"), ConfigError);
  std::istringstream in("# comment\nbudget = 5\nmystery = 1\n");
  try {
    parse_config(in, "exp.cfg");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.file() == "exp.cfg");
    CHECK(e.line() == 3);
  }
  std::istringstream ok("budget = 5   # short\n\nreplications=2\n");
  const auto p = parse_config(ok, "ok.cfg");
  CHECK(p.budget == 5);
  CHECK(p.replications == 2);
}

TEST_CASE("validation rejects impossible settings") {
  RunConfig c;
  validate(c);
  auto bad = [](auto mutate) {
    RunConfig x;
    mutate(x);
    CHECK_THROWS_AS(validate(x), ConfigError);
  };
  bad([](RunConfig& x) { x.budget = 0; });
  bad([](RunConfig& x) { x.replications = 0; });
  bad([](RunConfig& x) { x.workers = 0; });
  bad([](RunConfig& x) { x.algorithms.clear(); });
  bad([](RunConfig& x) { x.metrics.weights.w1 = -1; });
  bad([](RunConfig& x) { x.metrics.bin_width = 0; });
}

TEST_CASE("plan: replications per algorithm, NMSA once, consecutive seeds") {
  RunConfig c;
  c.replications = 4;
  c.seed = 10;
  const auto cells = plan_cells(c);
  CHECK(cells.size() == 6 * 4 + 1);
  int nmsa = 0;
  for (const auto& cell : cells) {
    if (cell.algorithm == optim::Algorithm::NMSA) {
      ++nmsa;
      CHECK(cell.deterministic);
    } else {
      CHECK(cell.seed == 10 + static_cast<std::uint64_t>(cell.replication));
    }
  }
  CHECK(nmsa == 1);
}

TEST_CASE("budget of one gives one evaluation per cell") {
  testing::TempDir tmp("budget1");
  auto c = small_config(tmp.path());
  c.budget = 1;
  const auto b = bowl_bundle(c);
  REQUIRE(b.cells.size() == 7);
  for (const auto& cell : b.cells) {
    CHECK(cell.result.trace.evaluations.size() == 1);
    CHECK(cell.objective_calls == 1);
  }
  write_report(b);
  std::ifstream in(tmp.path() / "traces.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 7);
}

TEST_CASE("objective calls never exceed the budget") {
  testing::TempDir tmp("calls");
  auto c = small_config(tmp.path());
  c.algorithms = {optim::kAllAlgorithms.begin(), optim::kAllAlgorithms.end()};
  c.replications = 2;
  const auto b = bowl_bundle(c);
  for (const auto& cell : b.cells) {
    INFO(optim::algorithm_name(cell.cell.algorithm));
    CHECK(cell.objective_calls <= 25);
    CHECK(cell.objective_calls <= cell.result.trace.evaluations.size());
  }
}

TEST_CASE("convergence curve is the mean of best-so-far across replications") {
  testing::TempDir tmp("curve");
  const auto b = bowl_bundle(small_config(tmp.path()));
  const auto curve = convergence_curve(b, optim::Algorithm::GA);
  REQUIRE(curve.size() == 25);
  double prev = INFINITY;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    std::vector<double> v;
    for (const auto& cell : b.cells) {
      if (cell.cell.algorithm != optim::Algorithm::GA) continue;
      const auto& ev = cell.result.trace.evaluations;
      v.push_back(ev[std::min(k, ev.size() - 1)].best_so_far);
    }
    REQUIRE(v.size() == 3);
    const double mean = (v[0] + v[1] + v[2]) / 3;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(curve[k].eval_index == k + 1);
    CHECK(curve[k].mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(curve[k].sd == doctest::Approx(std::sqrt(ss / 2)).epsilon(1e-12));
    CHECK(curve[k].runs == 3);
    CHECK(curve[k].mean <= prev);
    prev = curve[k].mean;
  }
  const auto nm = convergence_curve(b, optim::Algorithm::NMSA);
  REQUIRE_FALSE(nm.empty());
  CHECK(nm[0].runs == 1);
  CHECK(nm[0].sd == 0.0);
  CHECK(convergence_curve(b, optim::Algorithm::SPSA).empty());

  const auto best = best_cell(b, optim::Algorithm::CORS);
  REQUIRE(best);
  for (const auto& cell : b.cells) {
    if (cell.cell.algorithm == optim::Algorithm::CORS) {
      CHECK(b.cells[*best].result.best_value <= cell.result.best_value);
    }
  }
}

TEST_CASE("empty bundle writes only the config and manifest") {
  testing::TempDir tmp("empty");
  ResultBundle b;
  b.config.out = tmp.path();
  write_report(b);
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(tmp.path())) files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  CHECK(files == std::vector<std::string>{"manifest.json", "run_config.txt"});
}

TEST_CASE("rerunning a configuration reproduces the deterministic files byte for byte") {
  testing::TempDir a("rerun-a"), b("rerun-b");
  auto ca = small_config(a.path());
  auto cb = small_config(b.path());
  cb.workers = 2;  // scheduling must not matter
  write_report(bowl_bundle(ca));
  write_report(bowl_bundle(cb));
  for (const auto& f : deterministic_outputs()) {
    INFO(f);
    CHECK(testing::slurp(a.path() / f) == testing::slurp(b.path() / f));
  }
  // eval_log.csv carries wall times, so only the deterministic files are compared
  const auto da = manifest_digests(a.path());
  const auto db = manifest_digests(b.path());
  REQUIRE(da.size() == db.size());
  std::size_t compared = 0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const auto& det = deterministic_outputs();
    if (std::find(det.begin(), det.end(), da[i].first) == det.end()) continue;
    CHECK(da[i] == db[i]);
    ++compared;
  }
  CHECK(compared == deterministic_outputs().size());
}

TEST_CASE("report read back matches what was written") {
  testing::TempDir tmp("readback");
  const auto b = bowl_bundle(small_config(tmp.path()));
  write_report(b);
  const auto r = read_report(tmp.path());
  CHECK(echo(r.config) == echo(b.config));
  CHECK(r.scenario == "bowl");
  CHECK(r.param_names == b.param_names);
  CHECK(r.theta_true == b.theta_true);
  REQUIRE(r.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < b.cells.size(); ++i) {
    CHECK(r.cells[i].cell.algorithm == b.cells[i].cell.algorithm);
    CHECK(r.cells[i].cell.seed == b.cells[i].cell.seed);
    CHECK(r.cells[i].result.best_value == b.cells[i].result.best_value);
    CHECK(r.cells[i].result.trace.evaluations.size() == b.cells[i].result.trace.evaluations.size());
  }
  std::ostringstream x, y;
  write_convergence(x, b);
  write_convergence(y, r);
  CHECK(x.str() == y.str());
}

TEST_CASE("a failing objective surfaces after the pool stops") {
  RunConfig c;
  c.algorithms = {optim::Algorithm::GA};
  c.replications = 3;
  c.workers = 2;
  c.budget = 5;
  int calls = 0;
  auto f = [&](std::span<const double> x) {
    if (++calls > 3) throw DomainError("simulated failure");
    return bowl(x);
  };
  CHECK_THROWS_AS(run_cells(c, f, kBox, {0, 0, 0}), DomainError);
}

TEST_CASE("named dataset that does not exist points at generate") {
  RunConfig c;
  c.dataset = "/nonexistent/railcal-dataset";
  try {
    make_setup(c);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("railcal generate") != std::string::npos);
  }
}

TEST_CASE("experiment on the desk network: truth scores zero") {
  RunConfig c;
  c.algorithms = {optim::Algorithm::NMSA};
  c.budget = 2;
  c.replications = 1;
  const auto setup = make_setup(c);
  const auto b = run_experiment(c, setup);
  REQUIRE(b.true_value);
  CHECK(*b.true_value == 0.0);
  CHECK(b.start_value > 0.0);
  CHECK(b.scenario == "reference");
  REQUIRE(b.cells.size() == 1);
  CHECK(b.cells[0].objective_calls == 2);

  auto shifted = c;
  shifted.eval_seed = 2;
  const auto other = make_setup(shifted);
  CHECK(CalibrationObjective(other.context)(setup.dataset.scenario.theta) > 0.0);
}

}  // TEST_SUITE
