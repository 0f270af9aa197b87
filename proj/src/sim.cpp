#include "railcal/sim.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <ostream>
#include <set>

#include "railcal/error.hpp"
#include "railcal/rng.hpp"

namespace railcal {

Simulator::Simulator(const NetworkModel& network, const TrainEventList& events, std::span<const PassengerRecord> demand,
                     const ChoiceParams& choice, const CapacityParams& capacity, std::uint64_t seed,
                     const StudyPeriod& period, SimOptions options)
    : net_(network),
      events_(events),
      demand_(demand),
      capacity_(capacity),
      period_(period),
      options_(options),
      choice_table_(network, choice, period.interval_count()) {
  std::set<OdPair> missing;
  for (const auto& p : demand) {
    if (network.od_slot(p.origin, p.dest) == NetworkModel::npos) missing.insert(OdPair{p.origin, p.dest});
  }
  if (!missing.empty()) {
    std::string msg = "no path set for OD";
    for (const auto& od : missing) msg += " " + network.station(od.origin).id + "-" + network.station(od.dest).id;
    throw ConfigError(msg);
  }

  // Canonical order (tap_in, pax id) makes the run independent of record order.
  canonical_.resize(demand.size());
  std::iota(canonical_.begin(), canonical_.end(), 0u);
  std::stable_sort(canonical_.begin(), canonical_.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (demand[a].tap_in != demand[b].tap_in) return demand[a].tap_in < demand[b].tap_in;
    return demand[a].id < demand[b].id;
  });
  Rng rng(seed);
  draws_.resize(demand.size());
  for (auto& u : draws_) u = uniform01(rng);

  pax_.resize(demand.size());
  queues_.resize(network.platforms().size());
  trains_.resize(events.trains.size());
  out_.passengers.resize(demand.size());
  for (std::size_t i = 0; i < demand.size(); ++i) {
    auto& o = out_.passengers[i];
    o.origin = demand[i].origin;
    o.dest = demand[i].dest;
    o.tap_in = demand[i].tap_in;
  }
  if (options_.record_boardings) out_.boardings.resize(demand.size());
}

void Simulator::enqueue(PlatformIndex p, Seconds join, std::uint32_t pax) {
  auto& q = queues_[p];
  QueueEntry e{join, pax};
  if (q.empty() || !(e < q.back())) {
    q.push_back(e);
  } else {
    q.insert(std::upper_bound(q.begin(), q.end(), e), e);
  }
}

std::size_t Simulator::present_count(PlatformIndex p, Seconds t) const {
  const auto& q = queues_.at(p);
  auto it = std::partition_point(q.begin(), q.end(), [t](const QueueEntry& e) { return e.join <= t; });
  return static_cast<std::size_t>(it - q.begin());
}

void Simulator::inject_tap_ins(Seconds t) {
  while (next_tap_in_ < canonical_.size()) {
    const auto c = static_cast<std::uint32_t>(next_tap_in_);
    const auto& rec = demand_[canonical_[c]];
    if (rec.tap_in > t) break;
    ++next_tap_in_;
    // tap-ins before the study period use the first interval's choice model
    const int interval = rec.tap_in < period_.start ? 1 : period_.interval_of(rec.tap_in);
    const auto slot = net_.od_slot(rec.origin, rec.dest);
    const auto pos = choice_table_.draw(slot, interval, draws_[c]);
    const Path& path = net_.paths_at(slot)[pos];
    pax_[c] = PaxState{&path, 0};
    out_.passengers[canonical_[c]].path_id = path.id;
    ++out_.entered;
    enqueue(path.legs.front().board, rec.tap_in + net_.station(rec.origin).walk(), c);
  }
}

Simulator::TrainState& Simulator::touch_train(const TrainEvent& e) {
  auto& tr = trains_.at(e.train);
  if (tr.by_alight.empty()) tr.by_alight.resize(net_.stations().size());
  ++tr.processed;
  return tr;
}

bool Simulator::is_last_event(const TrainEvent& e) const {
  return trains_[e.train].processed == events_.trains[e.train].event_count;
}

void Simulator::step() {
  const auto& e = events_.events.at(cursor_++);
  if (e.kind == EventKind::Arrival) process_arrival(e);
  else process_departure(e);
}

void Simulator::process_arrival(const TrainEvent& e) {
  inject_tap_ins(e.time);
  auto& tr = touch_train(e);

  std::vector<std::uint32_t> alighting;
  alighting.swap(tr.by_alight[e.station]);
  tr.load -= static_cast<std::int64_t>(alighting.size());
  for (auto c : alighting) {
    auto& ps = pax_[c];
    const auto& legs = ps.path->legs;
    const auto& leg = legs[ps.leg];
    assert(leg.alight_station == e.station && leg.route == e.route);
    if (ps.leg + 1 == legs.size()) {
      auto& o = out_.passengers[canonical_[c]];
      o.tap_out = e.time + net_.station(ps.path->od.dest).walk();
      o.status = PassengerStatus::Exited;
      ++out_.exited;
    } else {
      const auto& next = legs[ps.leg + 1];
      ++ps.leg;
      enqueue(next.board, e.time + net_.transfer_walk(leg.alight, next.board), c);
    }
  }

  if (is_last_event(e)) strand_onboard(tr, e);
}

void Simulator::strand_onboard(TrainState& tr, const TrainEvent& e) {
  if (tr.load == 0) return;
  // Train ends its run short of some alighting stations: those passengers
  // wait for the next train of the same route on this platform.
  const auto platform = net_.platform_of(e.station, e.route);
  for (auto& bucket : tr.by_alight) {
    for (auto c : bucket) enqueue(platform, e.time, c);
    bucket.clear();
  }
  tr.load = 0;
}

void Simulator::process_departure(const TrainEvent& e) {
  inject_tap_ins(e.time);
  auto& tr = touch_train(e);
  if (is_last_event(e)) {  // nowhere to carry passengers
    strand_onboard(tr, e);
    return;
  }

  const auto platform = net_.platform_of(e.station, e.route);
  auto& q = queues_[platform];
  const auto present = static_cast<std::int64_t>(present_count(platform, e.time));
  const std::int64_t h = tr.load;
  const auto cap = effective_capacity(e.n_cars, h, present, net_.station(e.station).congested, capacity_);
  const auto boarded = std::min(boarding_allowance(cap, h), present);
  for (std::int64_t i = 0; i < boarded; ++i) {
    const auto entry = q.front();
    q.pop_front();
    const auto& ps = pax_[entry.pax];
    tr.by_alight[ps.path->legs[ps.leg].alight_station].push_back(entry.pax);
    if (options_.record_boardings) {
      out_.boardings[canonical_[entry.pax]].push_back(BoardingRecord{e.train, platform, entry.join, e.time});
    }
  }
  tr.load += boarded;
  out_.stops.push_back(StopRecord{e.train, e.station, e.route, e.time, e.n_cars, h, present, cap, boarded,
                                  present - boarded, tr.load});
}

SimOutput Simulator::finish() && {
  for (auto& tr : trains_) {
    out_.onboard_at_end += tr.load;
    for (const auto& bucket : tr.by_alight) {
      for (auto c : bucket) out_.passengers[canonical_[c]].status = PassengerStatus::Onboard;
    }
  }
  for (PlatformIndex p = 0; p < queues_.size(); ++p) {
    out_.queued_at_end += static_cast<std::int64_t>(queues_[p].size());
    for (const auto& e : queues_[p]) {
      out_.passengers[canonical_[e.pax]].status = PassengerStatus::Queued;
      if (options_.record_boardings) out_.stranded.push_back(StrandedEntry{p, e.join, canonical_[e.pax]});
    }
  }
  out_.not_entered = static_cast<std::int64_t>(demand_.size()) - out_.entered;
  return std::move(out_);
}

SimOutput simulate(const NetworkModel& network, const TrainEventList& events, std::span<const PassengerRecord> demand,
                   const ChoiceParams& choice, const CapacityParams& capacity, std::uint64_t seed,
                   const StudyPeriod& period, SimOptions options) {
  Simulator sim(network, events, demand, choice, capacity, seed, period, options);
  sim.run_to_end();
  return std::move(sim).finish();
}

namespace {

const char* status_name(PassengerStatus s) {
  switch (s) {
    case PassengerStatus::Exited: return "exited";
    case PassengerStatus::Onboard: return "onboard";
    case PassengerStatus::Queued: return "queued";
    case PassengerStatus::NotEntered: return "not_entered";
  }
  return "?";
}

}  // namespace

void write_passenger_csv(std::ostream& out, const NetworkModel& network, std::span<const PassengerRecord> demand,
                         const SimOutput& sim) {
  out << "pax_id,origin,dest,tap_in_s,path_id,tap_out_s,status\n";
  for (std::size_t i = 0; i < sim.passengers.size(); ++i) {
    const auto& p = sim.passengers[i];
    out << demand[i].id << ',' << network.station(p.origin).id << ',' << network.station(p.dest).id << ','
        << p.tap_in << ',';
    if (p.path_id >= 0) out << p.path_id;
    out << ',';
    if (p.tap_out) out << *p.tap_out;
    out << ',' << status_name(p.status) << '\n';
  }
}

void write_load_csv(std::ostream& out, const NetworkModel& network, const TrainEventList& events,
                    const SimOutput& sim) {
  out << "train_id,line,direction,station,dep_s,n_cars,load_before,queue,capacity,boarded,left_behind,load_after\n";
  for (const auto& s : sim.stops) {
    const auto& r = network.route(s.route);
    out << events.trains[s.train].id << ',' << r.line << ',' << r.direction << ',' << network.station(s.station).id
        << ',' << s.time << ',' << s.n_cars << ',' << s.load_before << ',' << s.queue << ',' << s.capacity << ','
        << s.boarded << ',' << s.left_behind << ',' << s.load_after << '\n';
  }
}

}  // namespace railcal
