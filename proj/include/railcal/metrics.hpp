#pragma once

// Calibration objective: squared error of OD exit flows plus a weighted sum of
// journey-time-distribution KL divergences over OD/exit-interval cells that
// have enough samples in both the model and the observations.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "railcal/bounds.hpp"
#include "railcal/capacity.hpp"
#include "railcal/choice.hpp"
#include "railcal/core.hpp"
#include "railcal/sim.hpp"

namespace railcal {

struct ExitKey {
  StationIndex origin;
  StationIndex dest;
  int interval;  // exit interval; 0 for exits before the study period
  auto operator<=>(const ExitKey&) const = default;
};

using ExitFlows = std::map<ExitKey, std::int64_t>;
using JourneyTimes = std::map<ExitKey, std::vector<double>>;  // seconds, ascending

/// Exit-interval index of a tap-out time.
int exit_interval(const StudyPeriod& period, Seconds tap_out);

ExitFlows exit_flows(const SimOutput& sim, const StudyPeriod& period);

struct Observations {
  ExitFlows flows;
  JourneyTimes journey_times;
};

Observations observe(const SimOutput& sim, const StudyPeriod& period);
/// Same quantities from AFC records carrying tap-out times (records without
/// one are skipped).
Observations observe(std::span<const PassengerRecord> afc, const StudyPeriod& period);

struct JourneyTimeDistribution {
  double bin_width = 60.0;
  std::vector<double> probabilities;
  std::size_t sample_count = 0;
};

/// Histogram over [0, max sample] with `bins` bins of `bin_width` seconds
/// (bins == 0 sizes the grid to the samples), smoothed by adding `smoothing`
/// to every bin probability and renormalising. Returns nullopt unless the
/// sample count exceeds `threshold`.
std::optional<JourneyTimeDistribution> estimate_jtd(std::span<const double> samples, double bin_width,
                                                    std::size_t threshold, std::size_t bins = 0,
                                                    double smoothing = 1e-6);

/// sum_b f_b ln(f_b / g_b) in nats. Throws DomainError on mismatched grids or
/// non-positive bins in g.
double kl_divergence(const JourneyTimeDistribution& f, const JourneyTimeDistribution& g);

struct ObjectiveWeights {
  double w1 = 1.0;
  double w2 = 1000.0;
};

struct MetricsConfig {
  ObjectiveWeights weights;
  std::size_t threshold = 10;  // E: a cell needs more than E samples
  double bin_width = 60.0;
  double smoothing = 1e-6;
};

struct ObjectiveTerms {
  double flow_sse = 0.0;  // unweighted
  double kl_sum = 0.0;    // unweighted
  std::size_t eligible_cells = 0;
  double total = 0.0;
};

ObjectiveTerms score(const Observations& model, const Observations& observed, const MetricsConfig& config);

// ---------------------------------------------------------------------------
// Parameter vector: four choice coefficients then three capacity parameters.

inline constexpr std::size_t kNumParams = 7;
using ParamArray = std::array<double, kNumParams>;

std::span<const std::string_view, kNumParams> param_names();
ChoiceParams choice_params(std::span<const double> theta, double gamma_cf);
CapacityParams capacity_params(std::span<const double> theta);
ParamArray pack_params(const ChoiceParams& choice, const CapacityParams& capacity);

/// Immutable inputs of one calibration.
struct CalibrationContext {
  NetworkModel network;
  TrainEventList events;
  std::vector<PassengerRecord> demand;
  Observations observed;
  StudyPeriod period;
  MetricsConfig metrics;
  std::uint64_t sim_seed = 0;  // common random numbers across evaluations
  double gamma_cf = 1.0;
  Bounds bounds;
};

/// Z(theta). Copies share the context; concurrent calls are safe.
class CalibrationObjective {
 public:
  explicit CalibrationObjective(std::shared_ptr<const CalibrationContext> ctx) : ctx_(std::move(ctx)) {}

  double operator()(std::span<const double> theta) const { return evaluate(theta).total; }
  /// Throws BoundsError when theta lies outside the context bounds.
  ObjectiveTerms evaluate(std::span<const double> theta) const;
  SimOutput simulate_at(std::span<const double> theta) const;
  const CalibrationContext& context() const { return *ctx_; }

 private:
  std::shared_ptr<const CalibrationContext> ctx_;
};

}  // namespace railcal
