#include <array>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "railcal/error.hpp"
#include "railcal/sim.hpp"
#include "railcal/synth.hpp"

namespace railcal::synth {

using nlohmann::json;

SyntheticDataset generate(const Fixture& fx, const TrainEventList& events, const Scenario& scenario,
                          std::uint64_t seed, const MetricsConfig& metrics, double gamma_cf) {
  if (!scenario.bounds.contains(scenario.theta)) throw BoundsError("scenario " + scenario.name + ": theta outside bounds");
  SyntheticDataset ds;
  ds.scenario = scenario;
  ds.seed = seed;
  ds.gamma_cf = gamma_cf;
  ds.metrics = metrics;
  auto sim = simulate(fx.network, events, fx.demand, choice_params(scenario.theta, gamma_cf),
                      capacity_params(scenario.theta), seed, fx.period);
  for (std::size_t i = 0; i < fx.demand.size(); ++i) {
    if (!sim.passengers[i].tap_out) continue;
    PassengerRecord r = fx.demand[i];
    r.tap_out = sim.passengers[i].tap_out;
    ds.afc.push_back(std::move(r));
  }
  ds.observed = observe(ds.afc, fx.period);
  ds.demand_count = static_cast<std::int64_t>(fx.demand.size());
  ds.unserved = ds.demand_count - static_cast<std::int64_t>(ds.afc.size());
  return ds;
}

std::string file_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace {

constexpr const char* kFixtureFiles[] = {"network.txt", "paths.csv", "timetable.csv", "demand.csv", "period.txt"};

}  // namespace

void write_dataset(const SyntheticDataset& ds, const Fixture& fx, const std::filesystem::path& fixture_dir,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "afc_observed.csv", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "afc_observed.csv").string());
    write_afc(out, fx.network, ds.afc);
  }
  json j;
  j["scenario"] = ds.scenario.name;
  j["theta_true"] = std::vector<double>(ds.scenario.theta.begin(), ds.scenario.theta.end());
  j["lower"] = ds.scenario.bounds.lower;
  j["upper"] = ds.scenario.bounds.upper;
  j["seed"] = ds.seed;
  j["gamma_cf"] = ds.gamma_cf;
  j["metrics"] = {{"w1", ds.metrics.weights.w1},
                  {"w2", ds.metrics.weights.w2},
                  {"threshold", ds.metrics.threshold},
                  {"bin_width", ds.metrics.bin_width},
                  {"smoothing", ds.metrics.smoothing}};
  j["demand_count"] = ds.demand_count;
  j["unserved"] = ds.unserved;
  j["fixture"] = fixture_dir.empty() ? std::string("built-in")
                                     : std::filesystem::absolute(fixture_dir).lexically_normal().string();
  json files;
  files["afc_observed.csv"] = file_digest(dir / "afc_observed.csv");
  for (auto f : kFixtureFiles) {
    if (!fixture_dir.empty() && std::filesystem::exists(fixture_dir / f)) files[f] = file_digest(fixture_dir / f);
  }
  j["digests"] = files;
  std::ofstream out(dir / "dataset.json", std::ios::binary);
  out << j.dump(2) << '\n';
}

SyntheticDataset load_dataset(const std::filesystem::path& dir, const Fixture& fx) {
  const auto meta = dir / "dataset.json";
  std::ifstream in(meta);
  if (!in) {
    throw ConfigError("no dataset at " + dir.string() + "; create one with `railcal generate --scenario <name> --out " +
                      dir.string() + "`");
  }
  SyntheticDataset ds;
  try {
    const json j = json::parse(in);
    ds.scenario.name = j.at("scenario").get<std::string>();
    const auto theta = j.at("theta_true").get<std::vector<double>>();
    if (theta.size() != kNumParams) throw ConfigError(meta.string() + ": theta_true needs 7 values");
    std::copy(theta.begin(), theta.end(), ds.scenario.theta.begin());
    ds.scenario.bounds.lower = j.at("lower").get<std::vector<double>>();
    ds.scenario.bounds.upper = j.at("upper").get<std::vector<double>>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.gamma_cf = j.at("gamma_cf").get<double>();
    const auto& m = j.at("metrics");
    ds.metrics.weights.w1 = m.at("w1").get<double>();
    ds.metrics.weights.w2 = m.at("w2").get<double>();
    ds.metrics.threshold = m.at("threshold").get<std::size_t>();
    ds.metrics.bin_width = m.at("bin_width").get<double>();
    ds.metrics.smoothing = m.at("smoothing").get<double>();
    ds.demand_count = j.at("demand_count").get<std::int64_t>();
    ds.unserved = j.at("unserved").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(meta.string() + ": " + e.what());
  }
  ds.scenario.bounds.validate();
  ds.afc = load_afc(dir / "afc_observed.csv", fx.network);
  ds.observed = observe(ds.afc, fx.period);
  return ds;
}

}  // namespace railcal::synth
