#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "railcal/core.hpp"
#include "railcal/sim.hpp"

namespace testing {

using namespace railcal;

/// Network built from the text formats, so tests read like the files users write.
inline NetworkModel network_from(const std::string& network_txt, const std::string& paths_csv) {
  std::istringstream n(network_txt), p(paths_csv);
  auto net = parse_network(n, "network.txt");
  if (!paths_csv.empty()) parse_paths(p, "paths.csv", net);
  return net;
}

inline std::vector<TimetableRow> timetable_from(const std::string& csv) {
  std::istringstream in(csv);
  return parse_timetable(in, "timetable.csv");
}

inline PassengerRecord pax(const NetworkModel& net, const std::string& id, const char* o, const char* d, Seconds t) {
  PassengerRecord p;
  p.id = id;
  p.origin = net.station_index(o);
  p.dest = net.station_index(d);
  p.tap_in = t;
  return p;
}

/// Two-station line A -> B, walk 60 at both ends.
inline const char* kLineNetwork =
    "[stations]\n"
    "id,name,congested,walk_s\n"
    "A,Alpha,0,60\n"
    "B,Beta,0,60\n"
    "[lines]\n"
    "line_id,direction,station_seq\n"
    "L,east,A B\n";

inline const char* kLinePaths =
    "od_origin,od_dest,path_id,station_seq,ivt_min,rel_walk,n_transfers,interval\n"
    "A,B,1,A B,5,0.4,0,\n";

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("railcal-test-" + tag + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace testing

namespace testing {

/// OD O -> D served by k parallel single-line routes O - Xi - D, one path each,
/// with the given attributes. Every pair of paths shares exactly O and D.
inline NetworkModel parallel_paths(const std::vector<AttributeVector>& attrs) {
  NetworkModel net;
  auto station = [&](const std::string& id) {
    Station s;
    s.id = id;
    s.name = id;
    return net.add_station(std::move(s));
  };
  const auto o = station("O");
  const auto d = station("D");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    const auto x = station("X" + std::to_string(i + 1));
    net.add_route("L" + std::to_string(i + 1), "out", {o, x, d});
  }
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    Path p;
    p.od = {o, d};
    p.id = static_cast<int>(i + 1);
    p.stations = {o, net.station_index("X" + std::to_string(i + 1)), d};
    p.attributes = attrs[i];
    net.add_path(std::move(p));
  }
  return net;
}

}  // namespace testing
