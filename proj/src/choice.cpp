#include "railcal/choice.hpp"

#include <algorithm>
#include <cmath>

#include "railcal/error.hpp"

namespace railcal {

namespace {

std::size_t shared_stations(const Path& a, const Path& b) {
  std::size_t n = 0;
  for (auto s : a.stations) {
    if (std::find(b.stations.begin(), b.stations.end(), s) != b.stations.end()) ++n;
  }
  return n;
}

double utility(const AttributeVector& x, double cf, const ChoiceParams& p) {
  double v = p.beta_cf * cf;
  for (std::size_t k = 0; k < kNumAttributes; ++k) v += p.beta_x[k] * x[k];
  return p.mu * v;
}

std::vector<double> commonality_factors(std::span<const Path> set, double gamma_cf) {
  std::vector<double> cf;
  cf.reserve(set.size());
  for (const auto& p : set) cf.push_back(commonality_factor(p, set, gamma_cf));
  return cf;
}

}  // namespace

double commonality_factor(const Path& path, std::span<const Path> path_set, double gamma_cf) {
  if (path_set.empty()) throw DomainError("commonality factor of an empty path set");
  if (!(gamma_cf > 0.0)) throw DomainError("commonality exponent must be positive");
  const double dr = static_cast<double>(path.stations.size());
  double sum = 0.0;
  for (const auto& other : path_set) {
    const double shared = static_cast<double>(shared_stations(path, other));
    sum += std::pow(shared / (dr * static_cast<double>(other.stations.size())), gamma_cf);
  }
  return std::log(sum);
}

std::vector<double> logit_probabilities(std::span<const double> utilities) {
  std::vector<double> p(utilities.begin(), utilities.end());
  if (p.empty()) return p;
  const double vmax = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (auto& v : p) {
    v = std::exp(v - vmax);
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

std::size_t inverse_cdf(std::span<const double> probabilities, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return i;
  }
  // rounding left u above the accumulated total: take the last positive entry
  for (std::size_t i = probabilities.size(); i-- > 0;) {
    if (probabilities[i] > 0.0) return i;
  }
  return 0;
}

std::vector<double> choice_probabilities(const NetworkModel& network, StationIndex origin, StationIndex dest,
                                         int interval, const ChoiceParams& params) {
  auto set = network.paths(origin, dest);
  if (set.empty()) {
    throw LookupError("no paths for OD " + network.station(origin).id + "-" + network.station(dest).id);
  }
  auto cf = commonality_factors(set, params.gamma_cf);
  std::vector<double> v(set.size());
  for (std::size_t r = 0; r < set.size(); ++r) v[r] = utility(set[r].attributes_at(interval), cf[r], params);
  return logit_probabilities(v);
}

int sample_path(const NetworkModel& network, StationIndex origin, StationIndex dest, int interval,
                const ChoiceParams& params, Rng& rng) {
  auto p = choice_probabilities(network, origin, dest, interval, params);
  return network.paths(origin, dest)[inverse_cdf(p, uniform01(rng))].id;
}

ChoiceTable::ChoiceTable(const NetworkModel& network, const ChoiceParams& params, int interval_count)
    : intervals_(std::max(interval_count, 1)) {
  const auto ods = network.od_pairs();
  entries_.resize(ods.size() * static_cast<std::size_t>(intervals_));
  std::vector<double> v;
  for (std::size_t slot = 0; slot < ods.size(); ++slot) {
    auto set = network.paths_at(slot);
    auto cf = commonality_factors(set, params.gamma_cf);
    const bool varying = std::any_of(set.begin(), set.end(), [](const Path& p) { return p.interval_varying(); });
    std::size_t shared_offset = 0;
    for (int m = 1; m <= intervals_; ++m) {
      auto& e = entries_[slot * static_cast<std::size_t>(intervals_) + static_cast<std::size_t>(m - 1)];
      if (!varying && m > 1) {
        e = Entry{shared_offset, set.size()};
        continue;
      }
      v.assign(set.size(), 0.0);
      for (std::size_t r = 0; r < set.size(); ++r) v[r] = utility(set[r].attributes_at(m), cf[r], params);
      auto p = logit_probabilities(v);
      e = Entry{probs_.size(), p.size()};
      shared_offset = e.offset;
      double acc = 0.0;
      for (double x : p) {
        probs_.push_back(x);
        acc += x;
        cumulative_.push_back(acc);
      }
    }
  }
}

std::size_t ChoiceTable::draw(std::size_t od_slot, int interval, double u) const {
  interval = std::clamp(interval, 1, intervals_);
  const auto& e = entries_.at(od_slot * static_cast<std::size_t>(intervals_) + static_cast<std::size_t>(interval - 1));
  auto first = cumulative_.begin() + static_cast<std::ptrdiff_t>(e.offset);
  auto last = first + static_cast<std::ptrdiff_t>(e.size);
  auto it = std::upper_bound(first, last, u);
  if (it == last) return inverse_cdf(probabilities(od_slot, interval), u);
  return static_cast<std::size_t>(it - first);
}

std::span<const double> ChoiceTable::probabilities(std::size_t od_slot, int interval) const {
  interval = std::clamp(interval, 1, intervals_);
  const auto& e = entries_.at(od_slot * static_cast<std::size_t>(intervals_) + static_cast<std::size_t>(interval - 1));
  return std::span<const double>(probs_).subspan(e.offset, e.size);
}

}  // namespace railcal
