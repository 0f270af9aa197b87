#pragma once

// C-logit path choice: multinomial logit over an OD's enumerated paths with a
// commonality-factor term penalising overlap between alternatives.

#include <span>
#include <vector>

#include "railcal/core.hpp"
#include "railcal/rng.hpp"

namespace railcal {

struct ChoiceParams {
  AttributeVector beta_x{};  // in-vehicle time, relative walking time, transfers
  double beta_cf = 0.0;
  double mu = 1.0;
  double gamma_cf = 1.0;
};

/// ln sum_{r'} (D_{r,r'} / (D_r D_{r'}))^gamma, D counting shared stations.
/// Throws DomainError for an empty set.
double commonality_factor(const Path& path, std::span<const Path> path_set, double gamma_cf);

/// Probability per path of the OD set in ascending path-id order.
/// Throws LookupError when the OD has no paths or attributes are missing.
std::vector<double> choice_probabilities(const NetworkModel& network, StationIndex origin, StationIndex dest,
                                         int interval, const ChoiceParams& params);

/// Logit probabilities from raw utilities (max-subtracted).
std::vector<double> logit_probabilities(std::span<const double> utilities);

/// Inverse-CDF draw over `probabilities`; returns the position, never past the end.
std::size_t inverse_cdf(std::span<const double> probabilities, double u);

/// Draws one path id using a single uniform from `rng`.
int sample_path(const NetworkModel& network, StationIndex origin, StationIndex dest, int interval,
                const ChoiceParams& params, Rng& rng);

/// Cumulative choice probabilities for every (OD, interval) computed once per
/// parameter vector and shared by all passengers of a simulation run.
class ChoiceTable {
 public:
  ChoiceTable(const NetworkModel& network, const ChoiceParams& params, int interval_count);

  /// Position of the chosen path within the OD's path set.
  std::size_t draw(std::size_t od_slot, int interval, double u) const;
  std::span<const double> probabilities(std::size_t od_slot, int interval) const;
  int interval_count() const { return intervals_; }

 private:
  struct Entry {
    std::size_t offset;
    std::size_t size;
  };
  int intervals_;
  std::vector<Entry> entries_;  // [od_slot * intervals + (interval - 1)]
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace railcal
