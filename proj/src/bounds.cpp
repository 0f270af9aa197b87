#include "railcal/bounds.hpp"

#include <algorithm>

#include "railcal/error.hpp"

namespace railcal {

void Bounds::validate() const {
  if (lower.size() != upper.size()) throw DomainError("bounds: lower and upper sizes differ");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw DomainError("bounds: lower exceeds upper in component " + std::to_string(i));
  }
}

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

std::vector<double> Bounds::midpoint() const {
  std::vector<double> m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = 0.5 * (lower[i] + upper[i]);
  return m;
}

std::vector<double> Bounds::project(std::span<const double> x) const {
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lower[i], upper[i]);
  return p;
}

std::vector<double> Bounds::to_unit(std::span<const double> x) const {
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = upper[i] - lower[i];
    u[i] = w > 0.0 ? (x[i] - lower[i]) / w : 0.0;
  }
  return u;
}

std::vector<double> Bounds::from_unit(std::span<const double> u) const {
  std::vector<double> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    x[i] = lower[i] + (upper[i] - lower[i]) * u[i];
    // keep the image inside the box despite rounding
    x[i] = std::clamp(x[i], lower[i], upper[i]);
  }
  return x;
}

}  // namespace railcal
