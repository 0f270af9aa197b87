#include "railcal/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "railcal/error.hpp"
#include "railcal/kernels.hpp"

namespace railcal {

int exit_interval(const StudyPeriod& period, Seconds tap_out) {
  return tap_out < period.start ? 0 : period.interval_of(tap_out);
}

ExitFlows exit_flows(const SimOutput& sim, const StudyPeriod& period) {
  ExitFlows flows;
  for (const auto& p : sim.passengers) {
    if (p.tap_out) ++flows[ExitKey{p.origin, p.dest, exit_interval(period, *p.tap_out)}];
  }
  return flows;
}

namespace {

void finish(Observations& obs) {
  for (auto& [k, v] : obs.journey_times) std::sort(v.begin(), v.end());
}

}  // namespace

Observations observe(const SimOutput& sim, const StudyPeriod& period) {
  Observations obs;
  for (const auto& p : sim.passengers) {
    if (!p.tap_out) continue;
    ExitKey key{p.origin, p.dest, exit_interval(period, *p.tap_out)};
    ++obs.flows[key];
    obs.journey_times[key].push_back(static_cast<double>(*p.tap_out - p.tap_in));
  }
  finish(obs);
  return obs;
}

Observations observe(std::span<const PassengerRecord> afc, const StudyPeriod& period) {
  Observations obs;
  for (const auto& p : afc) {
    if (!p.tap_out) continue;
    ExitKey key{p.origin, p.dest, exit_interval(period, *p.tap_out)};
    ++obs.flows[key];
    obs.journey_times[key].push_back(static_cast<double>(*p.tap_out - p.tap_in));
  }
  finish(obs);
  return obs;
}

std::optional<JourneyTimeDistribution> estimate_jtd(std::span<const double> samples, double bin_width,
                                                    std::size_t threshold, std::size_t bins, double smoothing) {
  if (!(bin_width > 0.0)) throw DomainError("bin width must be positive");
  if (samples.size() <= threshold) return std::nullopt;
  double max_sample = 0.0;
  for (double s : samples) {
    if (!(s >= 0.0)) throw DomainError("journey time samples must be nonnegative");
    max_sample = std::max(max_sample, s);
  }
  const auto needed = static_cast<std::size_t>(std::floor(max_sample / bin_width)) + 1;
  if (bins == 0) bins = needed;
  if (bins < needed) throw DomainError("histogram grid shorter than the largest sample");

  JourneyTimeDistribution jtd;
  jtd.bin_width = bin_width;
  jtd.sample_count = samples.size();
  std::vector<double> counts(bins, 0.0);
  for (double s : samples) counts[static_cast<std::size_t>(std::floor(s / bin_width))] += 1.0;
  const double n = static_cast<double>(samples.size());
  const double norm = 1.0 + smoothing * static_cast<double>(bins);
  jtd.probabilities.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) jtd.probabilities[b] = (counts[b] / n + smoothing) / norm;
  return jtd;
}

double kl_divergence(const JourneyTimeDistribution& f, const JourneyTimeDistribution& g) {
  if (f.bin_width != g.bin_width || f.probabilities.size() != g.probabilities.size()) {
    throw DomainError("KL divergence needs identical histogram grids");
  }
  double kl = 0.0;
  for (std::size_t b = 0; b < f.probabilities.size(); ++b) {
    const double p = f.probabilities[b];
    const double q = g.probabilities[b];
    if (p == 0.0) continue;
    if (!(q > 0.0)) throw DomainError("reference histogram has an empty bin");
    kl += p * std::log(p / q);
  }
  return kl;
}

ObjectiveTerms score(const Observations& model, const Observations& observed, const MetricsConfig& config) {
  ObjectiveTerms t;

  // Exit flows over the union of cells; absent cells count as zero.
  std::vector<double> a;
  std::vector<double> b;
  a.reserve(model.flows.size() + observed.flows.size());
  b.reserve(a.capacity());
  auto im = model.flows.begin();
  auto io = observed.flows.begin();
  while (im != model.flows.end() || io != observed.flows.end()) {
    if (io == observed.flows.end() || (im != model.flows.end() && im->first < io->first)) {
      a.push_back(static_cast<double>(im->second));
      b.push_back(0.0);
      ++im;
    } else if (im == model.flows.end() || io->first < im->first) {
      a.push_back(0.0);
      b.push_back(static_cast<double>(io->second));
      ++io;
    } else {
      a.push_back(static_cast<double>(im->second));
      b.push_back(static_cast<double>(io->second));
      ++im;
      ++io;
    }
  }
  t.flow_sse = kernels::sum_sq_diff(a, b);

  // KL over cells eligible on both sides, on a shared grid.
  for (const auto& [key, ms] : model.journey_times) {
    if (ms.size() <= config.threshold) continue;
    auto it = observed.journey_times.find(key);
    if (it == observed.journey_times.end() || it->second.size() <= config.threshold) continue;
    const auto& os = it->second;
    const double top = std::max(ms.back(), os.back());
    const auto bins = static_cast<std::size_t>(std::floor(top / config.bin_width)) + 1;
    auto f = estimate_jtd(ms, config.bin_width, config.threshold, bins, config.smoothing);
    auto g = estimate_jtd(os, config.bin_width, config.threshold, bins, config.smoothing);
    t.kl_sum += kl_divergence(*f, *g);
    ++t.eligible_cells;
  }
  t.total = config.weights.w1 * t.flow_sse + config.weights.w2 * t.kl_sum;
  return t;
}

// ---------------------------------------------------------------------------

std::span<const std::string_view, kNumParams> param_names() {
  static constexpr std::array<std::string_view, kNumParams> names{
      "beta_ivt", "beta_rel_walk", "beta_transfers", "beta_cf", "theta0", "theta1", "theta2"};
  return names;
}

ChoiceParams choice_params(std::span<const double> theta, double gamma_cf) {
  if (theta.size() != kNumParams) throw DomainError("parameter vector must have 7 components");
  ChoiceParams p;
  p.beta_x = {theta[0], theta[1], theta[2]};
  p.beta_cf = theta[3];
  p.mu = 1.0;
  p.gamma_cf = gamma_cf;
  return p;
}

CapacityParams capacity_params(std::span<const double> theta) {
  if (theta.size() != kNumParams) throw DomainError("parameter vector must have 7 components");
  return CapacityParams{theta[4], theta[5], theta[6]};
}

ParamArray pack_params(const ChoiceParams& choice, const CapacityParams& capacity) {
  return {choice.beta_x[0], choice.beta_x[1], choice.beta_x[2], choice.beta_cf,
          capacity.theta0,  capacity.theta1,  capacity.theta2};
}

SimOutput CalibrationObjective::simulate_at(std::span<const double> theta) const {
  const auto& c = *ctx_;
  if (!c.bounds.contains(theta)) throw BoundsError("parameter vector outside calibration bounds");
  return simulate(c.network, c.events, c.demand, choice_params(theta, c.gamma_cf), capacity_params(theta), c.sim_seed,
                  c.period);
}

ObjectiveTerms CalibrationObjective::evaluate(std::span<const double> theta) const {
  auto sim = simulate_at(theta);
  return score(observe(sim, ctx_->period), ctx_->observed, ctx_->metrics);
}

}  // namespace railcal
