#pragma once

// Domain model shared by every other module: stations, routes (a line in one
// direction), platforms, enumerated path sets, timetables and AFC records,
// plus the text formats they are stored in.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace railcal {

using Seconds = std::int64_t;  // seconds of day
using StationIndex = std::uint32_t;
using RouteIndex = std::uint32_t;
using PlatformIndex = std::uint32_t;

inline constexpr Seconds kDefaultStationWalk = 60;
inline constexpr Seconds kDefaultTransferWalk = 120;
inline constexpr Seconds kDefaultTau = 900;

struct Station {
  std::string id;
  std::string name;
  bool congested = false;
  std::optional<Seconds> walk_s;  // access/egress walk; blank in file -> default

  Seconds walk() const { return walk_s.value_or(kDefaultStationWalk); }
};

/// A line run in one direction. `stations` may revisit a station (a loop line
/// starts and ends at the same platform).
struct Route {
  std::string line;
  std::string direction;
  std::vector<StationIndex> stations;
};

struct Link {
  StationIndex from;
  StationIndex to;
  RouteIndex route;
};

/// A platform is (station, line, direction).
struct Platform {
  StationIndex station;
  RouteIndex route;
};

struct TransferLink {
  PlatformIndex from;
  PlatformIndex to;
  std::optional<Seconds> walk_s;
};

inline constexpr std::size_t kNumAttributes = 3;
/// In-vehicle time (minutes), relative walking time, number of transfers.
using AttributeVector = std::array<double, kNumAttributes>;

struct BoardingLeg {
  RouteIndex route;
  PlatformIndex board;
  PlatformIndex alight;
  StationIndex board_station;
  StationIndex alight_station;
};

struct OdPair {
  StationIndex origin;
  StationIndex dest;
  auto operator<=>(const OdPair&) const = default;
};

struct Path {
  OdPair od{};
  int id = 0;
  std::vector<StationIndex> stations;
  /// Interval-invariant attributes. Used when `by_interval` is empty.
  AttributeVector attributes{};
  /// Per-interval attributes keyed by 1-based interval index.
  std::map<int, AttributeVector> by_interval;
  std::vector<BoardingLeg> legs;  // derived on insertion

  bool interval_varying() const { return !by_interval.empty(); }
  /// Throws LookupError when the path is interval-varying and `interval` is absent.
  const AttributeVector& attributes_at(int interval) const;
};

class NetworkModel {
 public:
  StationIndex add_station(Station station);
  RouteIndex add_route(std::string line, std::string direction, std::vector<StationIndex> stations);
  void add_transfer(PlatformIndex from, PlatformIndex to, std::optional<Seconds> walk_s);
  /// Validates the station sequence against the link set, derives boarding
  /// legs and inserts the path into its OD set (kept sorted by id).
  void add_path(Path path);
  /// Derives boarding legs for a station sequence without inserting anything.
  std::vector<BoardingLeg> derive_legs(std::span<const StationIndex> stations) const;

  std::span<const Station> stations() const { return stations_; }
  const Station& station(StationIndex s) const { return stations_.at(s); }
  std::optional<StationIndex> find_station(std::string_view id) const;
  /// Throws IntegrityError for unknown ids.
  StationIndex station_index(std::string_view id) const;

  std::span<const Route> routes() const { return routes_; }
  const Route& route(RouteIndex r) const { return routes_.at(r); }
  std::optional<RouteIndex> find_route(std::string_view line, std::string_view direction) const;

  std::span<const Link> links() const { return links_; }
  bool has_link(StationIndex from, StationIndex to) const;

  std::span<const Platform> platforms() const { return platforms_; }
  std::optional<PlatformIndex> find_platform(StationIndex s, RouteIndex r) const;
  PlatformIndex platform_of(StationIndex s, RouteIndex r) const;
  /// "station:line:direction"
  std::string platform_token(PlatformIndex p) const;
  PlatformIndex parse_platform(std::string_view token) const;

  std::span<const TransferLink> transfers() const { return transfers_; }
  /// Walk between platforms: listed value, else 0 for the same platform,
  /// else kDefaultTransferWalk.
  Seconds transfer_walk(PlatformIndex from, PlatformIndex to) const;

  /// ODs with at least one path, ascending.
  std::span<const OdPair> od_pairs() const { return od_pairs_; }
  std::span<const Path> paths(StationIndex origin, StationIndex dest) const;
  std::span<const Path> paths_at(std::size_t od_slot) const { return path_sets_.at(od_slot); }
  /// Index into od_pairs(), or npos.
  std::size_t od_slot(StationIndex origin, StationIndex dest) const;
  std::size_t path_count() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Station> stations_;
  std::map<std::string, StationIndex, std::less<>> station_by_id_;
  std::vector<Route> routes_;
  std::vector<Link> links_;
  std::vector<Platform> platforms_;
  std::map<std::pair<StationIndex, RouteIndex>, PlatformIndex> platform_by_key_;
  std::vector<TransferLink> transfers_;
  std::map<std::pair<PlatformIndex, PlatformIndex>, Seconds> transfer_walks_;
  std::vector<OdPair> od_pairs_;
  std::vector<std::vector<Path>> path_sets_;
};

// ---------------------------------------------------------------------------
// Time

/// Study period [start, end) split into intervals of length tau. The final
/// interval is padded when the period is not a multiple of tau.
struct StudyPeriod {
  Seconds start = 0;
  Seconds end = 0;
  Seconds tau = kDefaultTau;

  int interval_count() const;
  bool contains(Seconds t) const { return t >= start && t < end; }
  /// 1-based interval index; valid for any t >= start (intervals past `end`
  /// keep counting, which is what exit times need).
  int interval_of(Seconds t) const;
};

// ---------------------------------------------------------------------------
// Timetable / train events

struct TimetableRow {
  std::string train_id;
  std::string line;
  std::string direction;
  std::string station;
  std::optional<Seconds> arr_s;
  std::optional<Seconds> dep_s;
  int n_cars = 0;
};

enum class EventKind : std::uint8_t { Arrival = 0, Departure = 1 };

struct TrainEvent {
  std::uint32_t train = 0;  // index into TrainEventList::trains
  RouteIndex route = 0;
  StationIndex station = 0;
  std::uint32_t stop = 0;  // position of this stop within the train's run
  EventKind kind = EventKind::Arrival;
  Seconds time = 0;
  int n_cars = 0;
};

struct TrainInfo {
  std::string id;
  RouteIndex route = 0;
  std::size_t event_count = 0;
};

struct TrainEventList {
  std::vector<TrainInfo> trains;  // sorted by id
  std::vector<TrainEvent> events;  // processing order
};

/// Total order used for the event list: (time, arrival before departure,
/// train id, stop).
bool event_precedes(const TrainEvent& a, const TrainEvent& b);

TrainEventList build_event_list(const NetworkModel& network, std::span<const TimetableRow> rows);

// ---------------------------------------------------------------------------
// AFC records and entry flows

struct PassengerRecord {
  std::string id;
  StationIndex origin = 0;
  StationIndex dest = 0;
  Seconds tap_in = 0;
  std::optional<Seconds> tap_out;
};

struct ODEntryFlow {
  StationIndex origin;
  StationIndex dest;
  int interval;
  std::int64_t count;
  auto operator<=>(const ODEntryFlow&) const = default;
};

struct EntryFlows {
  std::vector<ODEntryFlow> flows;     // sorted by (origin, dest, interval)
  std::vector<std::size_t> rejected;  // input indices with tap-in outside the period
};

EntryFlows aggregate_entry_flows(std::span<const PassengerRecord> records, const StudyPeriod& period);

// ---------------------------------------------------------------------------
// Path enumeration (fixture construction only)

/// Scheduled in-vehicle seconds along a path, read from the first train of
/// each route that serves the whole leg. Throws LookupError when no train does.
Seconds scheduled_in_vehicle_seconds(const NetworkModel& network, std::span<const TimetableRow> timetable,
                                     std::span<const BoardingLeg> legs);

/// Up to k simple station sequences from origin to dest, shortest scheduled
/// in-vehicle time first. Ties are broken by sequence length then
/// lexicographic station order.
std::vector<std::vector<StationIndex>> enumerate_paths(const NetworkModel& network,
                                                       std::span<const TimetableRow> timetable,
                                                       StationIndex origin, StationIndex dest,
                                                       std::size_t k = 3);

// ---------------------------------------------------------------------------
// Files

NetworkModel parse_network(std::istream& in, const std::string& name);
void parse_paths(std::istream& in, const std::string& name, NetworkModel& network);
std::vector<TimetableRow> parse_timetable(std::istream& in, const std::string& name);
std::vector<PassengerRecord> parse_afc(std::istream& in, const std::string& name, const NetworkModel& network);

void write_network(std::ostream& out, const NetworkModel& network);
void write_paths(std::ostream& out, const NetworkModel& network);
void write_timetable(std::ostream& out, std::span<const TimetableRow> rows);
void write_afc(std::ostream& out, const NetworkModel& network, std::span<const PassengerRecord> records);

/// Reads `dir/network.txt` and `dir/paths.csv`.
NetworkModel load_network(const std::filesystem::path& dir);
std::vector<TimetableRow> load_timetable(const std::filesystem::path& file);
std::vector<PassengerRecord> load_afc(const std::filesystem::path& file, const NetworkModel& network);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace railcal
