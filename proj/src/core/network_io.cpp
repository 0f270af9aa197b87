#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "railcal/core.hpp"
#include "railcal/error.hpp"

namespace railcal {

using detail::LineReader;
using detail::split;
using detail::split_ws;

const AttributeVector& Path::attributes_at(int interval) const {
  if (by_interval.empty()) return attributes;
  auto it = by_interval.find(interval);
  if (it == by_interval.end()) {
    throw LookupError("path " + std::to_string(id) + " has no attributes for interval " + std::to_string(interval));
  }
  return it->second;
}

StationIndex NetworkModel::add_station(Station station) {
  if (station.id.empty() || station.id.find_first_of(":, \t") != std::string::npos) {
    throw IntegrityError("invalid station id '" + station.id + "'");
  }
  if (station_by_id_.count(station.id)) throw IntegrityError("duplicate station id '" + station.id + "'");
  auto idx = static_cast<StationIndex>(stations_.size());
  station_by_id_.emplace(station.id, idx);
  stations_.push_back(std::move(station));
  return idx;
}

RouteIndex NetworkModel::add_route(std::string line, std::string direction, std::vector<StationIndex> stations) {
  if (find_route(line, direction)) throw IntegrityError("duplicate line/direction " + line + "/" + direction);
  if (stations.size() < 2) throw IntegrityError("line " + line + "/" + direction + " needs at least two stations");
  for (auto s : stations) {
    if (s >= stations_.size()) throw IntegrityError("line " + line + " references unknown station");
  }
  auto r = static_cast<RouteIndex>(routes_.size());
  for (std::size_t i = 0; i + 1 < stations.size(); ++i) {
    if (stations[i] == stations[i + 1]) throw IntegrityError("line " + line + " repeats a station consecutively");
    links_.push_back(Link{stations[i], stations[i + 1], r});
  }
  for (auto s : stations) {
    auto key = std::make_pair(s, r);
    if (!platform_by_key_.count(key)) {
      platform_by_key_.emplace(key, static_cast<PlatformIndex>(platforms_.size()));
      platforms_.push_back(Platform{s, r});
    }
  }
  routes_.push_back(Route{std::move(line), std::move(direction), std::move(stations)});
  return r;
}

void NetworkModel::add_transfer(PlatformIndex from, PlatformIndex to, std::optional<Seconds> walk_s) {
  if (from >= platforms_.size() || to >= platforms_.size()) throw IntegrityError("transfer references unknown platform");
  if (platforms_[from].station != platforms_[to].station) {
    throw IntegrityError("transfer " + platform_token(from) + " -> " + platform_token(to) + " spans two stations");
  }
  if (walk_s && *walk_s < 0) throw IntegrityError("negative transfer walk");
  transfers_.push_back(TransferLink{from, to, walk_s});
  transfer_walks_[{from, to}] = walk_s.value_or(kDefaultTransferWalk);
}

std::vector<BoardingLeg> NetworkModel::derive_legs(std::span<const StationIndex> seq) const {
  std::vector<BoardingLeg> legs;
  std::size_t k = 0;
  while (k + 1 < seq.size()) {
    // Pick the route occurrence that covers the longest run from seq[k];
    // ties go to the lower route index, then the earlier position.
    std::size_t best_len = 0;
    RouteIndex best_route = 0;
    for (RouteIndex r = 0; r < routes_.size(); ++r) {
      const auto& rs = routes_[r].stations;
      for (std::size_t pos = 0; pos < rs.size(); ++pos) {
        if (rs[pos] != seq[k]) continue;
        std::size_t len = 0;
        while (pos + len + 1 < rs.size() && k + len + 1 < seq.size() && rs[pos + len + 1] == seq[k + len + 1]) ++len;
        if (len > best_len) {
          best_len = len;
          best_route = r;
        }
      }
    }
    if (best_len == 0) {
      throw IntegrityError("no line serves link " + stations_[seq[k]].id + " -> " + stations_[seq[k + 1]].id);
    }
    StationIndex from = seq[k];
    StationIndex to = seq[k + best_len];
    legs.push_back(BoardingLeg{best_route, platform_of(from, best_route), platform_of(to, best_route), from, to});
    k += best_len;
  }
  return legs;
}

void NetworkModel::add_path(Path path) {
  if (path.stations.size() < 2) throw IntegrityError("path " + std::to_string(path.id) + " needs at least two stations");
  for (auto s : path.stations) {
    if (s >= stations_.size()) throw IntegrityError("path " + std::to_string(path.id) + " references unknown station");
  }
  if (path.stations.front() != path.od.origin || path.stations.back() != path.od.dest) {
    throw IntegrityError("path " + std::to_string(path.id) + " endpoints do not match its OD");
  }
  if (path.od.origin == path.od.dest) throw IntegrityError("path with identical origin and destination");
  {
    auto sorted = path.stations;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw IntegrityError("path " + std::to_string(path.id) + " visits a station twice");
    }
  }
  path.legs = derive_legs(path.stations);

  auto it = std::lower_bound(od_pairs_.begin(), od_pairs_.end(), path.od);
  auto slot = static_cast<std::size_t>(it - od_pairs_.begin());
  if (it == od_pairs_.end() || *it != path.od) {
    od_pairs_.insert(it, path.od);
    path_sets_.insert(path_sets_.begin() + static_cast<std::ptrdiff_t>(slot), std::vector<Path>{});
  }
  auto& set = path_sets_[slot];
  auto pit = std::lower_bound(set.begin(), set.end(), path.id, [](const Path& p, int id) { return p.id < id; });
  if (pit != set.end() && pit->id == path.id) {
    throw IntegrityError("duplicate path id " + std::to_string(path.id) + " for OD " + stations_[path.od.origin].id +
                         "-" + stations_[path.od.dest].id);
  }
  set.insert(pit, std::move(path));
}

std::optional<StationIndex> NetworkModel::find_station(std::string_view id) const {
  auto it = station_by_id_.find(id);
  if (it == station_by_id_.end()) return std::nullopt;
  return it->second;
}

StationIndex NetworkModel::station_index(std::string_view id) const {
  auto s = find_station(id);
  if (!s) throw IntegrityError("unknown station '" + std::string(id) + "'");
  return *s;
}

std::optional<RouteIndex> NetworkModel::find_route(std::string_view line, std::string_view direction) const {
  for (RouteIndex r = 0; r < routes_.size(); ++r) {
    if (routes_[r].line == line && routes_[r].direction == direction) return r;
  }
  return std::nullopt;
}

bool NetworkModel::has_link(StationIndex from, StationIndex to) const {
  return std::any_of(links_.begin(), links_.end(), [&](const Link& l) { return l.from == from && l.to == to; });
}

std::optional<PlatformIndex> NetworkModel::find_platform(StationIndex s, RouteIndex r) const {
  auto it = platform_by_key_.find({s, r});
  if (it == platform_by_key_.end()) return std::nullopt;
  return it->second;
}

PlatformIndex NetworkModel::platform_of(StationIndex s, RouteIndex r) const {
  auto p = find_platform(s, r);
  if (!p) throw IntegrityError("no platform for station " + stations_.at(s).id + " on " + routes_.at(r).line);
  return *p;
}

std::string NetworkModel::platform_token(PlatformIndex p) const {
  const auto& pl = platforms_.at(p);
  const auto& r = routes_[pl.route];
  return stations_[pl.station].id + ":" + r.line + ":" + r.direction;
}

PlatformIndex NetworkModel::parse_platform(std::string_view token) const {
  auto parts = split(token, ':');
  if (parts.size() != 3) throw IntegrityError("bad platform token '" + std::string(token) + "'");
  auto s = station_index(parts[0]);
  auto r = find_route(parts[1], parts[2]);
  if (!r) throw IntegrityError("unknown line/direction in platform '" + std::string(token) + "'");
  return platform_of(s, *r);
}

Seconds NetworkModel::transfer_walk(PlatformIndex from, PlatformIndex to) const {
  auto it = transfer_walks_.find({from, to});
  if (it != transfer_walks_.end()) return it->second;
  return from == to ? 0 : kDefaultTransferWalk;
}

std::span<const Path> NetworkModel::paths(StationIndex origin, StationIndex dest) const {
  auto slot = od_slot(origin, dest);
  if (slot == npos) return {};
  return path_sets_[slot];
}

std::size_t NetworkModel::od_slot(StationIndex origin, StationIndex dest) const {
  OdPair key{origin, dest};
  auto it = std::lower_bound(od_pairs_.begin(), od_pairs_.end(), key);
  if (it == od_pairs_.end() || *it != key) return npos;
  return static_cast<std::size_t>(it - od_pairs_.begin());
}

std::size_t NetworkModel::path_count() const {
  std::size_t n = 0;
  for (const auto& s : path_sets_) n += s.size();
  return n;
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

namespace {

enum class Section { None, Stations, Lines, Transfers };

bool parse_flag(const LineReader& reader, std::string_view f) {
  if (f == "1" || f == "true" || f == "yes") return true;
  if (f == "0" || f == "false" || f == "no" || f.empty()) return false;
  reader.fail("bad congested flag '" + std::string(f) + "'");
}

}  // namespace

NetworkModel parse_network(std::istream& in, const std::string& name) {
  NetworkModel net;
  LineReader reader(in, name);
  Section section = Section::None;
  bool need_header = false;
  std::size_t station_cols = 0;
  std::string_view line;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    if (line.front() == '[') {
      if (line == "[stations]") section = Section::Stations;
      else if (line == "[lines]") section = Section::Lines;
      else if (line == "[transfers]") section = Section::Transfers;
      else reader.fail("unknown section " + std::string(line));
      need_header = true;
      continue;
    }
    if (section == Section::None) reader.fail("data before first section");
    if (need_header) {
      need_header = false;
      switch (section) {
        case Section::Stations:
          if (line == "id,name,congested") station_cols = 3;
          else if (line == "id,name,congested,walk_s") station_cols = 4;
          else reader.fail("expected header 'id,name,congested[,walk_s]'");
          break;
        case Section::Lines: reader.expect_header(line, "line_id,direction,station_seq"); break;
        case Section::Transfers: reader.expect_header(line, "from,to,walk_s"); break;
        case Section::None: break;
      }
      continue;
    }
    auto f = split(line, ',');
    try {
      switch (section) {
        case Section::Stations: {
          if (f.size() != station_cols) reader.fail("expected " + std::to_string(station_cols) + " fields");
          Station st;
          st.id = std::string(f[0]);
          st.name = std::string(f[1]);
          st.congested = parse_flag(reader, f[2]);
          if (station_cols == 4) st.walk_s = reader.parse_optional_int<Seconds>(f[3], "walk_s");
          if (st.walk_s && *st.walk_s < 0) reader.fail("negative walk_s");
          net.add_station(std::move(st));
          break;
        }
        case Section::Lines: {
          if (f.size() != 3) reader.fail("expected 3 fields");
          std::vector<StationIndex> seq;
          for (auto id : split_ws(f[2])) seq.push_back(net.station_index(id));
          net.add_route(std::string(f[0]), std::string(f[1]), std::move(seq));
          break;
        }
        case Section::Transfers: {
          if (f.size() != 3) reader.fail("expected 3 fields");
          auto from = net.parse_platform(f[0]);
          auto to = net.parse_platform(f[1]);
          net.add_transfer(from, to, reader.parse_optional_int<Seconds>(f[2], "walk_s"));
          break;
        }
        case Section::None: break;
      }
    } catch (const IntegrityError& e) {
      throw IntegrityError(name + ":" + std::to_string(reader.line_no()) + ": " + e.what());
    }
  }
  if (net.stations().empty()) throw ParseError(name, reader.line_no(), "no stations");
  return net;
}

void parse_paths(std::istream& in, const std::string& name, NetworkModel& net) {
  LineReader reader(in, name);
  std::string_view line;
  if (!reader.next(line)) reader.fail("empty paths file");
  bool with_interval = false;
  if (line == "od_origin,od_dest,path_id,station_seq,ivt_min,rel_walk,n_transfers,interval") with_interval = true;
  else reader.expect_header(line, "od_origin,od_dest,path_id,station_seq,ivt_min,rel_walk,n_transfers");

  // Rows of one path may be spread over several intervals; gather first.
  struct Pending {
    Path path;
    bool has_invariant = false;
    std::size_t line_no = 0;
  };
  std::map<std::tuple<StationIndex, StationIndex, int>, Pending> pending;
  std::vector<std::tuple<StationIndex, StationIndex, int>> order;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    auto f = split(line, ',');
    if (f.size() != (with_interval ? 8u : 7u)) reader.fail("expected " + std::to_string(with_interval ? 8 : 7) + " fields");
    try {
      auto o = net.station_index(f[0]);
      auto d = net.station_index(f[1]);
      int id = reader.parse_int<int>(f[2], "path_id");
      std::vector<StationIndex> seq;
      for (auto s : split_ws(f[3])) seq.push_back(net.station_index(s));
      AttributeVector attrs{reader.parse_double(f[4], "ivt_min"), reader.parse_double(f[5], "rel_walk"),
                            reader.parse_double(f[6], "n_transfers")};
      std::optional<int> interval;
      if (with_interval) interval = reader.parse_optional_int<int>(f[7], "interval");
      if (interval && *interval < 1) reader.fail("interval must be >= 1");

      auto key = std::make_tuple(o, d, id);
      auto [it, inserted] = pending.try_emplace(key);
      auto& p = it->second;
      if (inserted) {
        order.push_back(key);
        p.path.od = OdPair{o, d};
        p.path.id = id;
        p.path.stations = std::move(seq);
        p.line_no = reader.line_no();
      } else if (p.path.stations != seq) {
        reader.fail("path " + std::to_string(id) + " station sequence differs between rows");
      }
      if (interval) {
        if (p.has_invariant) reader.fail("path mixes interval-invariant and per-interval rows");
        if (!p.path.by_interval.emplace(*interval, attrs).second) reader.fail("duplicate interval row");
      } else {
        if (p.has_invariant || !p.path.by_interval.empty()) reader.fail("path mixes interval-invariant and per-interval rows");
        p.has_invariant = true;
        p.path.attributes = attrs;
      }
    } catch (const IntegrityError& e) {
      throw IntegrityError(name + ":" + std::to_string(reader.line_no()) + ": " + e.what());
    }
  }
  for (const auto& key : order) {
    auto& p = pending.at(key);
    if (!p.path.by_interval.empty()) p.path.attributes = p.path.by_interval.begin()->second;
    try {
      net.add_path(std::move(p.path));
    } catch (const IntegrityError& e) {
      throw IntegrityError(name + ":" + std::to_string(p.line_no) + ": " + e.what());
    }
  }
}

void write_network(std::ostream& out, const NetworkModel& net) {
  out << "[stations]\nid,name,congested,walk_s\n";
  for (const auto& s : net.stations()) {
    out << s.id << ',' << s.name << ',' << (s.congested ? 1 : 0) << ',';
    if (s.walk_s) out << *s.walk_s;
    out << '\n';
  }
  out << "[lines]\nline_id,direction,station_seq\n";
  for (const auto& r : net.routes()) {
    out << r.line << ',' << r.direction << ',';
    for (std::size_t i = 0; i < r.stations.size(); ++i) out << (i ? " " : "") << net.station(r.stations[i]).id;
    out << '\n';
  }
  out << "[transfers]\nfrom,to,walk_s\n";
  for (const auto& t : net.transfers()) {
    out << net.platform_token(t.from) << ',' << net.platform_token(t.to) << ',';
    if (t.walk_s) out << *t.walk_s;
    out << '\n';
  }
}

void write_paths(std::ostream& out, const NetworkModel& net) {
  out << "od_origin,od_dest,path_id,station_seq,ivt_min,rel_walk,n_transfers,interval\n";
  auto row = [&](const Path& p, const AttributeVector& a, std::optional<int> interval) {
    out << net.station(p.od.origin).id << ',' << net.station(p.od.dest).id << ',' << p.id << ',';
    for (std::size_t i = 0; i < p.stations.size(); ++i) out << (i ? " " : "") << net.station(p.stations[i]).id;
    out << ',' << format_number(a[0]) << ',' << format_number(a[1]) << ',' << format_number(a[2]) << ',';
    if (interval) out << *interval;
    out << '\n';
  };
  for (std::size_t slot = 0; slot < net.od_pairs().size(); ++slot) {
    for (const auto& p : net.paths_at(slot)) {
      if (p.interval_varying()) {
        for (const auto& [m, a] : p.by_interval) row(p, a, m);
      } else {
        row(p, p.attributes, std::nullopt);
      }
    }
  }
}

NetworkModel load_network(const std::filesystem::path& dir) {
  auto net_file = dir / "network.txt";
  auto path_file = dir / "paths.csv";
  std::ifstream nin(net_file);
  if (!nin) throw ParseError(net_file.string(), 0, "cannot open");
  auto net = parse_network(nin, net_file.string());
  std::ifstream pin(path_file);
  if (!pin) throw ParseError(path_file.string(), 0, "cannot open");
  parse_paths(pin, path_file.string(), net);
  return net;
}

int StudyPeriod::interval_count() const {
  if (tau <= 0) throw DomainError("interval length must be positive");
  if (end <= start) return 0;
  return static_cast<int>((end - start + tau - 1) / tau);
}

int StudyPeriod::interval_of(Seconds t) const {
  if (tau <= 0) throw DomainError("interval length must be positive");
  if (t < start) throw DomainError("time precedes the study period");
  return static_cast<int>((t - start) / tau) + 1;
}

}  // namespace railcal
