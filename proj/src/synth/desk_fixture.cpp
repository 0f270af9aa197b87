#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "railcal/error.hpp"
#include "railcal/rng.hpp"
#include "railcal/synth.hpp"

namespace railcal::synth {

namespace {

constexpr Seconds kPeriodStart = 64800;  // 18:00
constexpr Seconds kPeriodEnd = 68400;
constexpr Seconds kServiceStart = 63000;
constexpr Seconds kServiceEnd = 72000;
constexpr double kIntervalProfile[] = {0.7, 1.0, 1.0, 0.6};

const char* const kTrunk[] = {"B1", "B2", "B3", "T", "B4", "B5"};
const char* const kLoop[] = {"C1", "C2", "C3", "C4", "C5", "C6"};

struct Flow {
  const char* origin;
  const char* dest;
  double per_hour;
};

// Hourly demand at profile 1. Inbound trunk flows from B1-B3 dominate so
// that up trains fill between B2 and T.
std::vector<Flow> base_demand() {
  std::vector<Flow> f;
  auto inbound = [&](const char* o, double to_t, double to_b4, double to_b5, double to_each_c) {
    f.push_back({o, "T", to_t});
    f.push_back({o, "B4", to_b4});
    f.push_back({o, "B5", to_b5});
    for (auto c : kLoop) f.push_back({o, c, to_each_c});
  };
  inbound("B1", 3500, 3000, 2500, 1900);
  inbound("B2", 3500, 3000, 2500, 1800);
  inbound("B3", 2000, 1500, 1000, 500);
  for (auto o : {"B4", "B5"}) {
    for (auto d : {"B1", "B2", "B3"}) f.push_back({o, d, 300});
    f.push_back({o, "T", 500});
    for (auto c : kLoop) f.push_back({o, c, 150});
  }
  f.push_back({"B4", "B5", 200});
  f.push_back({"B5", "B4", 200});
  for (auto d : kTrunk) {
    if (std::string_view(d) != "T") f.push_back({"T", d, 200});
  }
  for (auto c : kLoop) f.push_back({"T", c, 300});
  for (auto o : kLoop) {
    f.push_back({o, "T", 300});
    for (auto d : kTrunk) {
      if (std::string_view(d) != "T") f.push_back({o, d, 100});
    }
    for (auto d : kLoop) {
      if (std::string_view(o) != d) f.push_back({o, d, 300});
    }
  }
  return f;
}

std::string train_id(const char* prefix, int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03d", prefix, k);
  return buf;
}

void add_trains(std::vector<TimetableRow>& rows, const NetworkModel& net, RouteIndex r, const char* prefix,
                Seconds first_dep, Seconds run, const DeskOptions& o) {
  const auto& route = net.route(r);
  int k = 1;
  for (Seconds t0 = first_dep; t0 <= kServiceEnd; t0 += o.headway_s, ++k) {
    Seconds t = t0;
    for (std::size_t i = 0; i < route.stations.size(); ++i) {
      TimetableRow row;
      row.train_id = train_id(prefix, k);
      row.line = route.line;
      row.direction = route.direction;
      row.station = net.station(route.stations[i]).id;
      row.n_cars = o.n_cars;
      if (i > 0) {
        t += run;
        row.arr_s = t;
      }
      if (i + 1 < route.stations.size()) {
        if (i > 0) t += o.dwell_s;
        row.dep_s = t;
      }
      rows.push_back(std::move(row));
    }
  }
}

void add_paths(NetworkModel& net, const std::vector<TimetableRow>& timetable, StationIndex o, StationIndex d) {
  int id = 1;
  for (auto& seq : enumerate_paths(net, timetable, o, d, 3)) {
    Path p;
    p.od = {o, d};
    p.id = id++;
    p.stations = seq;
    const auto legs = net.derive_legs(seq);
    const double ivt = static_cast<double>(scheduled_in_vehicle_seconds(net, timetable, legs));
    Seconds walk = net.station(o).walk() + net.station(d).walk();
    for (std::size_t i = 0; i + 1 < legs.size(); ++i) walk += net.transfer_walk(legs[i].alight, legs[i + 1].board);
    p.attributes = {ivt / 60.0, static_cast<double>(walk) / ivt, static_cast<double>(legs.size() - 1)};
    net.add_path(std::move(p));
  }
}

}  // namespace

Fixture build_desk_fixture(const DeskOptions& o) {
  if (o.headway_s <= 0 || o.n_cars < 1 || o.demand_scale < 0.0) throw ConfigError("invalid desk fixture options");
  Fixture fx;
  auto& net = fx.network;
  auto station = [&](const char* id, const char* name, bool congested, Seconds walk) {
    Station s;
    s.id = id;
    s.name = name;
    s.congested = congested;
    s.walk_s = walk;
    return net.add_station(std::move(s));
  };
  const StationIndex t = station("T", "Interchange", true, 90);
  station("B1", "North Terminus", false, 60);
  station("B2", "Hill Road", false, 60);
  station("B3", "Market", true, 75);
  station("B4", "Harbour", false, 60);
  station("B5", "South Terminus", false, 60);
  for (int i = 1; i <= 6; ++i) {
    const std::string id = "C" + std::to_string(i);
    station(id.c_str(), ("Loop " + std::to_string(i)).c_str(), false, 45);
  }

  std::vector<StationIndex> up;
  for (auto s : kTrunk) up.push_back(net.station_index(s));
  std::vector<StationIndex> down(up.rbegin(), up.rend());
  std::vector<StationIndex> cw{t};
  for (auto s : kLoop) cw.push_back(net.station_index(s));
  cw.push_back(t);
  std::vector<StationIndex> ccw(cw.rbegin(), cw.rend());

  const RouteIndex r_up = net.add_route("B", "up", up);
  const RouteIndex r_down = net.add_route("B", "down", down);
  const RouteIndex r_cw = net.add_route("C", "cw", cw);
  const RouteIndex r_ccw = net.add_route("C", "ccw", ccw);

  auto transfer = [&](RouteIndex a, RouteIndex b, Seconds walk) {
    net.add_transfer(net.platform_of(t, a), net.platform_of(t, b), walk);
    net.add_transfer(net.platform_of(t, b), net.platform_of(t, a), walk);
  };
  transfer(r_up, r_cw, 60);
  transfer(r_up, r_ccw, 180);
  transfer(r_down, r_cw, 180);
  transfer(r_down, r_ccw, 60);
  transfer(r_cw, r_ccw, 120);
  transfer(r_up, r_down, 150);

  add_trains(fx.timetable, net, r_up, "BU", kServiceStart, o.run_b_s, o);
  add_trains(fx.timetable, net, r_down, "BD", kServiceStart + 60, o.run_b_s, o);
  add_trains(fx.timetable, net, r_cw, "CW", kServiceStart + 30, o.run_c_s, o);
  add_trains(fx.timetable, net, r_ccw, "CC", kServiceStart + 120, o.run_ccw_s, o);

  fx.period = StudyPeriod{kPeriodStart, kPeriodEnd, kDefaultTau};

  const auto flows = base_demand();
  for (const auto& f : flows) {
    const auto oi = net.station_index(f.origin);
    const auto di = net.station_index(f.dest);
    if (net.od_slot(oi, di) == NetworkModel::npos) add_paths(net, fx.timetable, oi, di);
  }

  Rng rng(o.seed);
  std::size_t next_id = 1;
  const double span = static_cast<double>(fx.period.tau);
  for (int m = 1; m <= fx.period.interval_count(); ++m) {
    const Seconds lo = fx.period.start + (m - 1) * fx.period.tau;
    const double profile = kIntervalProfile[(m - 1) % 4];
    for (const auto& f : flows) {
      const double mean = f.per_hour * span / 3600.0 * profile * o.demand_scale;
      auto count = static_cast<std::int64_t>(std::floor(mean));
      if (uniform01(rng) < mean - static_cast<double>(count)) ++count;
      for (std::int64_t i = 0; i < count; ++i) {
        PassengerRecord p;
        char buf[16];
        std::snprintf(buf, sizeof buf, "P%06zu", next_id++);
        p.id = buf;
        p.origin = net.station_index(f.origin);
        p.dest = net.station_index(f.dest);
        p.tap_in = lo + static_cast<Seconds>(uniform_index(rng, static_cast<std::size_t>(fx.period.tau)));
        fx.demand.push_back(std::move(p));
      }
    }
  }
  return fx;
}

void write_period(std::ostream& out, const StudyPeriod& p) {
  out << "start = " << p.start << "\nend = " << p.end << "\ntau = " << p.tau << '\n';
}

StudyPeriod parse_period(std::istream& in, const std::string& source) {
  StudyPeriod p;
  bool s = false, e = false;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected key = value");
    std::istringstream k(line.substr(0, eq)), v(line.substr(eq + 1));
    std::string key;
    Seconds value = 0;
    k >> key;
    if (!(v >> value)) throw ParseError(source, n, "expected an integer number of seconds");
    if (key == "start") {
      p.start = value;
      s = true;
    } else if (key == "end") {
      p.end = value;
      e = true;
    } else if (key == "tau") {
      p.tau = value;
    } else {
      throw ParseError(source, n, "unknown key '" + key + "'");
    }
  }
  if (!s || !e) throw ParseError(source, n, "period needs start and end");
  if (p.end <= p.start || p.tau <= 0) throw ParseError(source, n, "empty period or non-positive interval length");
  return p;
}

void write_fixture(const Fixture& fx, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("network.txt");
    write_network(out, fx.network);
  }
  {
    auto out = open("paths.csv");
    write_paths(out, fx.network);
  }
  {
    auto out = open("timetable.csv");
    write_timetable(out, fx.timetable);
  }
  {
    auto out = open("demand.csv");
    write_afc(out, fx.network, fx.demand);
  }
  {
    auto out = open("period.txt");
    write_period(out, fx.period);
  }
}

Fixture load_fixture(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("fixture directory " + dir.string() + " not found");
  Fixture fx;
  fx.network = load_network(dir);
  fx.timetable = load_timetable(dir / "timetable.csv");
  fx.demand = load_afc(dir / "demand.csv", fx.network);
  std::ifstream in(dir / "period.txt");
  if (!in) throw ParseError((dir / "period.txt").string(), 0, "cannot open");
  fx.period = parse_period(in, (dir / "period.txt").string());
  return fx;
}

}  // namespace railcal::synth
