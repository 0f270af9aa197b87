#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "railcal/error.hpp"
#include "railcal/synth.hpp"

using namespace railcal;

namespace {

struct Desk {
  synth::Fixture fx = synth::build_desk_fixture();
  TrainEventList events = build_event_list(fx.network, fx.timetable);
};

const Desk& desk() {
  static const Desk d;
  return d;
}

std::shared_ptr<CalibrationContext> context_for(const synth::SyntheticDataset& ds) {
  auto ctx = std::make_shared<CalibrationContext>();
  ctx->network = desk().fx.network;
  ctx->events = desk().events;
  ctx->demand = desk().fx.demand;
  ctx->observed = ds.observed;
  ctx->period = desk().fx.period;
  ctx->metrics = ds.metrics;
  ctx->sim_seed = ds.seed;
  ctx->gamma_cf = ds.gamma_cf;
  ctx->bounds = ds.scenario.bounds;
  return ctx;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("five presets with their parameter vectors") {
  const auto presets = synth::scenario_presets();
  REQUIRE(presets.size() == 5);
  const auto ref = synth::scenario_by_name("reference");
  CHECK(ref.theta == ParamArray{-0.147, -1.271, -0.573, -3.679, 232, 0.0732, 0.0607});
  CHECK(synth::scenario_by_name("random-choice").theta == ParamArray{0, 0, 0, 0, 232, 0.0732, 0.0607});
  CHECK(synth::scenario_by_name("deterministic-choice").theta == ParamArray{-2, -5, -3, -10, 232, 0.0732, 0.0607});
  CHECK(synth::scenario_by_name("crowding-sensitive").theta ==
        ParamArray{-0.147, -1.271, -0.573, -3.679, 225, 0.2, 0.2});
  CHECK(synth::scenario_by_name("crowding-insensitive").theta ==
        ParamArray{-0.147, -1.271, -0.573, -3.679, 235, 0, 0});
  const auto b = synth::default_bounds();
  CHECK(b.lower == std::vector<double>{-2, -5, -3, -10, 220, 0, 0});
  CHECK(b.upper == std::vector<double>{0, 0, 0, 0, 260, 0.2, 0.2});
  for (const auto& s : presets) {
    INFO(s.name);
    CHECK(s.bounds.contains(s.theta));
  }
  CHECK_THROWS_AS(synth::scenario_by_name("rush-hour"), ConfigError);
}

TEST_CASE("published path-choice coefficients match the reference scenario") {
  // coefficients of the estimated path-choice model for the real network
  const std::array<double, 4> published{-0.147, -1.271, -0.573, -3.679};
  const auto ref = synth::scenario_by_name("reference");
  for (std::size_t i = 0; i < 4; ++i) CHECK(ref.theta[i] == published[i]);
}

TEST_CASE("scenario files") {
  std::istringstream a("# tighter capacity box\npreset = reference\nname = narrow\n"
                       "lower = -2 -5 -3 -10 225 0 0\nupper = 0 0 0 0 240 0.1 0.1\n");
  const auto s = synth::parse_scenario(a, "narrow.txt");
  CHECK(s.name == "narrow");
  CHECK(s.theta[4] == 232);
  CHECK(s.bounds.upper[4] == 240);

  std::istringstream b("theta = -0.1 -1 -0.5 -3 230 0.05 0.05\n");
  const auto c = synth::parse_scenario(b, "custom.txt");
  CHECK(c.name == "custom");
  CHECK(c.bounds.lower == synth::default_bounds().lower);

  std::istringstream bad("preset = reference\ntheta = 1 2 3\n");
  try {
    synth::parse_scenario(bad, "bad.txt");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream outside("preset = reference\nupper = 0 0 0 0 230 0.2 0.2\n");
  CHECK_THROWS_AS(synth::parse_scenario(outside, "outside.txt"), ConfigError);
  CHECK(synth::resolve_scenario("crowding-sensitive").theta[4] == 225);
  CHECK_THROWS(synth::resolve_scenario("no-such-scenario"));
}

TEST_CASE("objective vanishes at the true parameters of every scenario") {
  for (const auto& sc : synth::scenario_presets()) {
    INFO(sc.name);
    const auto ds = synth::generate(desk().fx, desk().events, sc, 1, MetricsConfig{});
    const CalibrationObjective z(context_for(ds));
    CHECK(z(sc.theta) == 0.0);
    CHECK(ds.demand_count == static_cast<std::int64_t>(desk().fx.demand.size()));
    CHECK(static_cast<std::int64_t>(ds.afc.size()) == ds.demand_count - ds.unserved);
    for (const auto& r : ds.afc) CHECK(r.tap_out.has_value());
  }
}

TEST_CASE("different seeds give different observations") {
  const auto sc = synth::scenario_by_name("reference");
  const auto a = synth::generate(desk().fx, desk().events, sc, 1, MetricsConfig{});
  const auto b = synth::generate(desk().fx, desk().events, sc, 2, MetricsConfig{});
  const auto c = synth::generate(desk().fx, desk().events, sc, 1, MetricsConfig{});
  CHECK(a.observed.journey_times != b.observed.journey_times);
  CHECK(a.observed.flows == c.observed.flows);
  CHECK(a.observed.journey_times == c.observed.journey_times);
}

TEST_CASE("crowding-insensitive capacity depends on train length only") {
  const auto sc = synth::scenario_by_name("crowding-insensitive");
  const auto out = simulate(desk().fx.network, desk().events, desk().fx.demand, choice_params(sc.theta, 1.0),
                            capacity_params(sc.theta), 1, desk().fx.period);
  REQUIRE_FALSE(out.stops.empty());
  bool constant = true;
  for (const auto& s : out.stops) constant = constant && s.capacity == 235 * s.n_cars;
  CHECK(constant);
}

TEST_CASE("reference scenario congests the desk network") {
  const auto sc = synth::scenario_by_name("reference");
  const auto out = simulate(desk().fx.network, desk().events, desk().fx.demand, choice_params(sc.theta, 1.0),
                            capacity_params(sc.theta), 1, desk().fx.period);
  std::int64_t left = 0;
  for (const auto& s : out.stops) left += s.left_behind;
  CHECK(left > 0);
}

TEST_CASE("dataset round trip through files") {
  const auto sc = synth::scenario_by_name("crowding-sensitive");
  const auto ds = synth::generate(desk().fx, desk().events, sc, 5, MetricsConfig{});
  testing::TempDir tmp("dataset");
  synth::write_dataset(ds, desk().fx, {}, tmp.path());
  CHECK(std::filesystem::exists(tmp.path() / "afc_observed.csv"));
  CHECK(std::filesystem::exists(tmp.path() / "dataset.json"));
  const auto back = synth::load_dataset(tmp.path(), desk().fx);
  CHECK(back.seed == 5);
  CHECK(back.scenario.name == sc.name);
  CHECK(back.scenario.theta == sc.theta);
  CHECK(back.scenario.bounds.lower == sc.bounds.lower);
  CHECK(back.demand_count == ds.demand_count);
  CHECK(back.unserved == ds.unserved);
  CHECK(back.observed.flows == ds.observed.flows);
  CHECK(back.observed.journey_times == ds.observed.journey_times);
  CHECK(synth::file_digest(tmp.path() / "afc_observed.csv").size() == 16);
  CHECK_THROWS(synth::load_dataset(tmp.path() / "missing", desk().fx));
}

TEST_CASE("file digest is FNV-1a") {
  testing::TempDir tmp("digest");
  {
    std::ofstream(tmp.path() / "empty", std::ios::binary);
    std::ofstream(tmp.path() / "a", std::ios::binary) << "a";
  }
  CHECK(synth::file_digest(tmp.path() / "empty") == "cbf29ce484222325");
  CHECK(synth::file_digest(tmp.path() / "a") == "af63dc4c8601ec8c");
}

TEST_CASE("desk options scale the fixture") {
  synth::DeskOptions o;
  o.demand_scale = 0.1;
  o.n_cars = 4;
  const auto small = synth::build_desk_fixture(o);
  CHECK(small.demand.size() < desk().fx.demand.size());
  for (const auto& r : small.timetable) CHECK(r.n_cars == 4);
  CHECK(small.network.path_count() == desk().fx.network.path_count());
}

}  // TEST_SUITE
