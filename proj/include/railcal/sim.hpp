#pragma once

// Event-driven, schedule-based transit network loading. Train events are
// processed in chronological order; passengers wait in first-come-first-board
// platform queues and board subject to the effective train capacity.

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "railcal/capacity.hpp"
#include "railcal/choice.hpp"
#include "railcal/core.hpp"

namespace railcal {

enum class PassengerStatus : std::uint8_t { Exited, Onboard, Queued, NotEntered };

struct BoardingRecord {
  std::uint32_t train;
  PlatformIndex platform;
  Seconds join;    // time the passenger reached the platform
  Seconds depart;  // departure of the boarded train
};

struct PassengerOutcome {
  StationIndex origin = 0;
  StationIndex dest = 0;
  Seconds tap_in = 0;
  int path_id = -1;  // -1 until tap-in
  std::optional<Seconds> tap_out;
  PassengerStatus status = PassengerStatus::NotEntered;
};

/// One departure of one train from one station.
struct StopRecord {
  std::uint32_t train;
  StationIndex station;
  RouteIndex route;
  Seconds time;
  int n_cars;
  std::int64_t load_before;  // after alighting, before boarding
  std::int64_t queue;        // passengers on the platform at departure
  std::int64_t capacity;     // effective capacity at this instant
  std::int64_t boarded;
  std::int64_t left_behind;
  std::int64_t load_after;
};

/// Queue entry still waiting when the event list ran out.
struct StrandedEntry {
  PlatformIndex platform;
  Seconds join;
  std::uint32_t passenger;  // demand input index
};

struct SimOptions {
  bool record_boardings = false;  // fills SimOutput::boardings and ::stranded
};

struct SimOutput {
  std::vector<PassengerOutcome> passengers;  // demand input order
  std::vector<StopRecord> stops;             // processing order
  std::vector<std::vector<BoardingRecord>> boardings;  // per passenger, when recorded
  std::vector<StrandedEntry> stranded;                 // when recorded
  std::int64_t entered = 0;
  std::int64_t exited = 0;
  std::int64_t onboard_at_end = 0;
  std::int64_t queued_at_end = 0;
  std::int64_t not_entered = 0;
};

class Simulator {
 public:
  /// Throws ConfigError listing every demand OD without a path set.
  Simulator(const NetworkModel& network, const TrainEventList& events, std::span<const PassengerRecord> demand,
            const ChoiceParams& choice, const CapacityParams& capacity, std::uint64_t seed, const StudyPeriod& period,
            SimOptions options = {});

  bool done() const { return cursor_ >= events_.events.size(); }
  /// Processes the next event of the list.
  void step();
  void run_to_end() {
    while (!done()) step();
  }

  /// Moves every passenger with tap_in <= t into the queue of their first
  /// boarding platform (join = tap_in + station walk).
  void inject_tap_ins(Seconds t);
  void process_arrival(const TrainEvent& e);
  void process_departure(const TrainEvent& e);

  std::size_t queue_size(PlatformIndex p) const { return queues_.at(p).size(); }
  /// Queue entries whose join time is <= t.
  std::size_t present_count(PlatformIndex p, Seconds t) const;
  std::int64_t train_load(std::uint32_t train) const { return trains_.at(train).load; }
  std::int64_t exited() const { return out_.exited; }
  std::int64_t entered() const { return out_.entered; }

  SimOutput finish() &&;

 private:
  struct QueueEntry {
    Seconds join;
    std::uint32_t pax;  // canonical index; order = (tap_in, pax id)
    bool operator<(const QueueEntry& o) const { return join != o.join ? join < o.join : pax < o.pax; }
  };
  struct TrainState {
    std::int64_t load = 0;
    std::size_t processed = 0;
    std::vector<std::vector<std::uint32_t>> by_alight;  // onboard, bucketed by alighting station
  };
  struct PaxState {
    const Path* path = nullptr;
    std::uint32_t leg = 0;
  };

  void enqueue(PlatformIndex p, Seconds join, std::uint32_t pax);
  TrainState& touch_train(const TrainEvent& e);
  bool is_last_event(const TrainEvent& e) const;
  void strand_onboard(TrainState& tr, const TrainEvent& e);

  const NetworkModel& net_;
  const TrainEventList& events_;
  std::span<const PassengerRecord> demand_;
  CapacityParams capacity_;
  StudyPeriod period_;
  SimOptions options_;
  ChoiceTable choice_table_;

  std::vector<std::uint32_t> canonical_;  // canonical -> input index
  std::vector<double> draws_;             // uniform per canonical passenger
  std::vector<PaxState> pax_;
  std::size_t next_tap_in_ = 0;
  std::size_t cursor_ = 0;
  std::vector<std::deque<QueueEntry>> queues_;
  std::vector<TrainState> trains_;
  SimOutput out_;
};

/// Runs the full event list.
SimOutput simulate(const NetworkModel& network, const TrainEventList& events, std::span<const PassengerRecord> demand,
                   const ChoiceParams& choice, const CapacityParams& capacity, std::uint64_t seed,
                   const StudyPeriod& period, SimOptions options = {});

void write_passenger_csv(std::ostream& out, const NetworkModel& network, std::span<const PassengerRecord> demand,
                         const SimOutput& sim);
void write_load_csv(std::ostream& out, const NetworkModel& network, const TrainEventList& events,
                    const SimOutput& sim);

}  // namespace railcal
