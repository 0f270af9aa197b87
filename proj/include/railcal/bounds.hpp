#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace railcal {

/// Box constraints L <= x <= U.
struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
  std::vector<double> midpoint() const;
  std::vector<double> project(std::span<const double> x) const;
  /// Maps x to [0, 1]^n (components with U == L map to 0).
  std::vector<double> to_unit(std::span<const double> x) const;
  std::vector<double> from_unit(std::span<const double> u) const;
  /// Throws DomainError when sizes differ or some L > U.
  void validate() const;
};

}  // namespace railcal
