#pragma once

// Synthetic ground truth: the five parameter scenarios, the bundled desk
// network, and datasets simulated at a known parameter vector.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "railcal/bounds.hpp"
#include "railcal/core.hpp"
#include "railcal/metrics.hpp"

namespace railcal::synth {

struct Scenario {
  std::string name;
  ParamArray theta{};
  Bounds bounds;
};

Bounds default_bounds();
/// reference, random-choice, deterministic-choice, crowding-sensitive,
/// crowding-insensitive.
std::vector<Scenario> scenario_presets();
/// Throws ConfigError for unknown names.
Scenario scenario_by_name(std::string_view name);

/// key = value lines: `preset = <name>` optionally followed by overrides
/// `theta = 7 numbers`, `lower = 7 numbers`, `upper = 7 numbers`, `name = ...`.
Scenario parse_scenario(std::istream& in, const std::string& source);
Scenario load_scenario(const std::filesystem::path& file);
/// A preset name or the path of a scenario file.
Scenario resolve_scenario(std::string_view name_or_path);

// ---------------------------------------------------------------------------
// Desk fixture

struct DeskOptions {
  std::uint64_t seed = 20230918;  // demand draw
  double demand_scale = 1.0;
  Seconds headway_s = 180;
  int n_cars = 8;
  Seconds run_b_s = 120;
  Seconds run_c_s = 90;  // clockwise loop
  Seconds run_ccw_s = 150;
  Seconds dwell_s = 30;
};

struct Fixture {
  NetworkModel network;
  std::vector<TimetableRow> timetable;
  std::vector<PassengerRecord> demand;  // tap_out empty
  StudyPeriod period;
};

/// Twelve stations on a two-way trunk line and a loop line meeting at one
/// transfer station, with demand heavy enough to fill inbound trains.
Fixture build_desk_fixture(const DeskOptions& options = {});

/// network.txt, paths.csv, timetable.csv, demand.csv, period.txt
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);
Fixture load_fixture(const std::filesystem::path& dir);

void write_period(std::ostream& out, const StudyPeriod& period);
StudyPeriod parse_period(std::istream& in, const std::string& source);

// ---------------------------------------------------------------------------
// Synthetic datasets

struct SyntheticDataset {
  Scenario scenario;
  std::uint64_t seed = 0;
  double gamma_cf = 1.0;
  MetricsConfig metrics;
  std::vector<PassengerRecord> afc;  // passengers that exited, with tap-outs
  Observations observed;
  std::int64_t demand_count = 0;
  std::int64_t unserved = 0;
};

/// Simulates the demand at the scenario's parameters and records what an AFC
/// system would have seen.
SyntheticDataset generate(const Fixture& fixture, const TrainEventList& events, const Scenario& scenario,
                          std::uint64_t seed, const MetricsConfig& metrics, double gamma_cf = 1.0);

/// afc_observed.csv and dataset.json (seed, true parameters, bounds, metric
/// settings, file digests) under dir.
void write_dataset(const SyntheticDataset& dataset, const Fixture& fixture, const std::filesystem::path& fixture_dir,
                   const std::filesystem::path& dir);
/// Reads a dataset written by write_dataset against the fixture network.
SyntheticDataset load_dataset(const std::filesystem::path& dir, const Fixture& fixture);

/// FNV-1a 64-bit digest of a file's bytes as 16 hex digits.
std::string file_digest(const std::filesystem::path& file);

}  // namespace railcal::synth
