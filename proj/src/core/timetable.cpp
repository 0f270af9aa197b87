#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

#include "csv.hpp"
#include "railcal/core.hpp"
#include "railcal/error.hpp"

namespace railcal {

using detail::LineReader;
using detail::split;

std::vector<TimetableRow> parse_timetable(std::istream& in, const std::string& name) {
  LineReader reader(in, name);
  std::string_view line;
  if (!reader.next(line)) reader.fail("empty timetable");
  reader.expect_header(line, "train_id,line,direction,station,arr_s,dep_s,n_cars");
  std::vector<TimetableRow> rows;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    auto f = split(line, ',');
    if (f.size() != 7) reader.fail("expected 7 fields");
    TimetableRow r;
    r.train_id = std::string(f[0]);
    r.line = std::string(f[1]);
    r.direction = std::string(f[2]);
    r.station = std::string(f[3]);
    r.arr_s = reader.parse_optional_int<Seconds>(f[4], "arr_s");
    r.dep_s = reader.parse_optional_int<Seconds>(f[5], "dep_s");
    r.n_cars = reader.parse_int<int>(f[6], "n_cars");
    if (r.train_id.empty()) reader.fail("empty train id");
    if (!r.arr_s && !r.dep_s) reader.fail("row has neither arrival nor departure");
    if (r.n_cars < 1) reader.fail("n_cars must be positive");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_timetable(std::ostream& out, std::span<const TimetableRow> rows) {
  out << "train_id,line,direction,station,arr_s,dep_s,n_cars\n";
  for (const auto& r : rows) {
    out << r.train_id << ',' << r.line << ',' << r.direction << ',' << r.station << ',';
    if (r.arr_s) out << *r.arr_s;
    out << ',';
    if (r.dep_s) out << *r.dep_s;
    out << ',' << r.n_cars << '\n';
  }
}

std::vector<TimetableRow> load_timetable(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open");
  return parse_timetable(in, file.string());
}

bool event_precedes(const TrainEvent& a, const TrainEvent& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.kind != b.kind) return a.kind == EventKind::Arrival;
  if (a.train != b.train) return a.train < b.train;
  return a.stop < b.stop;
}

TrainEventList build_event_list(const NetworkModel& net, std::span<const TimetableRow> rows) {
  // Group rows per train and put each train's stops in time order.
  std::map<std::string, std::vector<const TimetableRow*>> by_train;
  for (const auto& r : rows) by_train[r.train_id].push_back(&r);
  auto first_time = [](const TimetableRow* r) { return r->arr_s ? *r->arr_s : r->dep_s.value_or(0); };
  for (auto& [id, train_rows] : by_train) {
    std::stable_sort(train_rows.begin(), train_rows.end(),
                     [&](const TimetableRow* a, const TimetableRow* b) { return first_time(a) < first_time(b); });
  }

  TrainEventList list;
  list.trains.reserve(by_train.size());
  for (const auto& [id, train_rows] : by_train) {
    auto train_index = static_cast<std::uint32_t>(list.trains.size());
    const auto& first = *train_rows.front();
    auto route = net.find_route(first.line, first.direction);
    if (!route) throw IntegrityError("train " + id + ": unknown line/direction " + first.line + "/" + first.direction);
    const auto& seq = net.route(*route).stations;

    // Locate the starting position on the route, then require that each
    // following row is the next station of the route.
    auto s0 = net.station_index(first.station);
    auto start = std::find(seq.begin(), seq.end(), s0);
    if (start == seq.end()) throw IntegrityError("train " + id + ": station " + first.station + " not on its line");
    std::size_t pos = static_cast<std::size_t>(start - seq.begin());

    std::size_t events_before = list.events.size();
    std::optional<Seconds> last_time;
    for (std::size_t k = 0; k < train_rows.size(); ++k) {
      const auto& r = *train_rows[k];
      if (r.line != first.line || r.direction != first.direction) {
        throw IntegrityError("train " + id + " changes line/direction mid-run");
      }
      auto s = net.station_index(r.station);
      if (k > 0) {
        ++pos;
        if (pos >= seq.size() || seq[pos] != s) {
          throw IntegrityError("train " + id + ": station " + r.station + " does not follow the line order");
        }
      }
      if (!r.arr_s && !r.dep_s) throw IntegrityError("train " + id + " has an empty stop at " + r.station);
      if (r.arr_s && r.dep_s && *r.dep_s < *r.arr_s) {
        throw OrderingError("train " + id + " departs " + r.station + " before arriving");
      }
      Seconds stop_first = r.arr_s ? *r.arr_s : *r.dep_s;
      // Travel between consecutive stops must take time, otherwise the
      // arrival-first tie-break would process the next arrival before this
      // departure.
      if (last_time && stop_first <= *last_time) {
        throw OrderingError("train " + id + " reaches " + r.station + " no later than it left the previous stop");
      }
      auto stop = static_cast<std::uint32_t>(k);
      if (r.arr_s) list.events.push_back(TrainEvent{train_index, *route, s, stop, EventKind::Arrival, *r.arr_s, r.n_cars});
      if (r.dep_s) list.events.push_back(TrainEvent{train_index, *route, s, stop, EventKind::Departure, *r.dep_s, r.n_cars});
      last_time = r.dep_s ? *r.dep_s : *r.arr_s;
    }
    list.trains.push_back(TrainInfo{id, *route, list.events.size() - events_before});
  }
  std::sort(list.events.begin(), list.events.end(), event_precedes);
  return list;
}

}  // namespace railcal
