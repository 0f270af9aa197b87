#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include "csv.hpp"
#include "railcal/core.hpp"
#include "railcal/error.hpp"

namespace railcal {

using detail::LineReader;
using detail::split;

std::vector<PassengerRecord> parse_afc(std::istream& in, const std::string& name, const NetworkModel& net) {
  LineReader reader(in, name);
  std::string_view line;
  if (!reader.next(line)) reader.fail("empty AFC file");
  reader.expect_header(line, "pax_id,origin,tap_in_s,dest,tap_out_s");
  std::vector<PassengerRecord> out;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    auto f = split(line, ',');
    if (f.size() != 5) reader.fail("expected 5 fields");
    PassengerRecord p;
    p.id = std::string(f[0]);
    if (p.id.empty()) reader.fail("empty pax_id");
    auto o = net.find_station(f[1]);
    auto d = net.find_station(f[3]);
    if (!o || !d) {
      throw IntegrityError(name + ":" + std::to_string(reader.line_no()) + ": unknown station in AFC record " + p.id);
    }
    p.origin = *o;
    p.dest = *d;
    p.tap_in = reader.parse_int<Seconds>(f[2], "tap_in_s");
    p.tap_out = reader.parse_optional_int<Seconds>(f[4], "tap_out_s");
    if (p.tap_out && *p.tap_out < p.tap_in) reader.fail("tap_out precedes tap_in");
    out.push_back(std::move(p));
  }
  return out;
}

void write_afc(std::ostream& out, const NetworkModel& net, std::span<const PassengerRecord> records) {
  out << "pax_id,origin,tap_in_s,dest,tap_out_s\n";
  for (const auto& p : records) {
    out << p.id << ',' << net.station(p.origin).id << ',' << p.tap_in << ',' << net.station(p.dest).id << ',';
    if (p.tap_out) out << *p.tap_out;
    out << '\n';
  }
}

std::vector<PassengerRecord> load_afc(const std::filesystem::path& file, const NetworkModel& net) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open");
  return parse_afc(in, file.string(), net);
}

EntryFlows aggregate_entry_flows(std::span<const PassengerRecord> records, const StudyPeriod& period) {
  EntryFlows result;
  std::map<std::tuple<StationIndex, StationIndex, int>, std::int64_t> counts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& p = records[i];
    if (!period.contains(p.tap_in)) {
      result.rejected.push_back(i);
      continue;
    }
    ++counts[{p.origin, p.dest, period.interval_of(p.tap_in)}];
  }
  result.flows.reserve(counts.size());
  for (const auto& [k, c] : counts) result.flows.push_back(ODEntryFlow{std::get<0>(k), std::get<1>(k), std::get<2>(k), c});
  return result;
}

}  // namespace railcal
