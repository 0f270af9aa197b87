#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace railcal {

struct CapacityParams {
  double theta0 = 0.0;  // persons per car
  double theta1 = 0.0;  // train-load sensitivity
  double theta2 = 0.0;  // platform-queue sensitivity
};

/// Effective capacity of a train at a station. At congested stations the
/// base capacity theta0*n grows with the load on board and the queue on the
/// platform; elsewhere it is the base capacity. Floored to whole passengers.
inline std::int64_t effective_capacity(int n_cars, std::int64_t load, std::int64_t queue, bool congested,
                                       const CapacityParams& p) {
  double c = p.theta0 * n_cars;
  if (congested) c += p.theta1 * static_cast<double>(load) + p.theta2 * static_cast<double>(queue);
  // 1e-9 absorbs representation error such as 0.29 * 100 = 28.999999999999996
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(c + 1e-9)));
}

inline std::int64_t boarding_allowance(std::int64_t capacity, std::int64_t load) {
  return std::max<std::int64_t>(0, capacity - load);
}

}  // namespace railcal
