#include <algorithm>
#include <map>
#include <tuple>

#include "railcal/core.hpp"
#include "railcal/error.hpp"

namespace railcal {

Seconds scheduled_in_vehicle_seconds(const NetworkModel& net, std::span<const TimetableRow> timetable,
                                     std::span<const BoardingLeg> legs) {
  std::map<std::string, std::vector<const TimetableRow*>> by_train;
  for (const auto& r : timetable) by_train[r.train_id].push_back(&r);

  Seconds total = 0;
  for (const auto& leg : legs) {
    const auto& route = net.route(leg.route);
    const auto& board_id = net.station(leg.board_station).id;
    const auto& alight_id = net.station(leg.alight_station).id;
    std::optional<Seconds> found;
    for (const auto& [id, rows] : by_train) {
      if (rows.front()->line != route.line || rows.front()->direction != route.direction) continue;
      for (std::size_t i = 0; i < rows.size() && !found; ++i) {
        if (rows[i]->station != board_id || !rows[i]->dep_s) continue;
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
          if (rows[j]->station == alight_id && rows[j]->arr_s) {
            found = *rows[j]->arr_s - *rows[i]->dep_s;
            break;
          }
        }
      }
      if (found) break;
    }
    if (!found) throw LookupError("no train serves " + board_id + " -> " + alight_id + " on " + route.line);
    total += *found;
  }
  return total;
}

std::vector<std::vector<StationIndex>> enumerate_paths(const NetworkModel& net, std::span<const TimetableRow> timetable,
                                                       StationIndex origin, StationIndex dest, std::size_t k) {
  std::vector<std::vector<StationIndex>> adjacency(net.stations().size());
  for (const auto& l : net.links()) adjacency[l.from].push_back(l.to);
  for (auto& a : adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  std::vector<std::vector<StationIndex>> found;
  std::vector<StationIndex> stack{origin};
  std::vector<bool> visited(net.stations().size(), false);
  visited[origin] = true;
  auto dfs = [&](auto&& self, StationIndex at) -> void {
    if (at == dest) {
      found.push_back(stack);
      return;
    }
    for (auto next : adjacency[at]) {
      if (visited[next]) continue;
      visited[next] = true;
      stack.push_back(next);
      self(self, next);
      stack.pop_back();
      visited[next] = false;
    }
  };
  dfs(dfs, origin);

  std::vector<std::tuple<Seconds, std::size_t, std::vector<StationIndex>>> ranked;
  for (auto& seq : found) {
    try {
      auto legs = net.derive_legs(seq);
      ranked.emplace_back(scheduled_in_vehicle_seconds(net, timetable, legs), seq.size(), std::move(seq));
    } catch (const LookupError&) {
      // sequence not served by any scheduled train
    }
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::vector<StationIndex>> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(std::get<2>(ranked[i]));
  return out;
}

}  // namespace railcal
