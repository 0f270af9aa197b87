#include <cmath>
#include <map>

#include "problem.hpp"

namespace railcal::optim {

double halton(std::uint64_t index, std::uint32_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

namespace {

std::uint32_t nth_prime(std::size_t n) {
  std::uint32_t c = 1;
  std::size_t found = 0;
  while (found <= n) {
    ++c;
    bool prime = c >= 2;
    for (std::uint32_t d = 2; d * d <= c && prime; ++d) prime = c % d != 0;
    if (prime) ++found;
  }
  return c;
}

}  // namespace

std::vector<Point> ortho_directions(std::size_t n, std::uint64_t halton_index) {
  Point q(n);
  double qq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = 2.0 * halton(halton_index, nth_prime(i)) - 1.0;
    qq += q[i] * q[i];
  }
  if (qq == 0.0) {
    q[0] = 1.0;
    qq = 1.0;
  }
  std::vector<Point> dirs(n, Point(n));
  Point neg(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      dirs[j][i] = (i == j ? 1.0 : 0.0) - 2.0 * q[i] * q[j] / qq;
      neg[i] -= dirs[j][i];
    }
  }
  const double norm = std::sqrt(detail::sq_dist(neg, Point(n, 0.0)));
  for (auto& v : neg) v /= norm;
  dirs.push_back(std::move(neg));
  return dirs;
}

namespace detail {

void run_mads(Problem& p, const MadsSettings& s, const Point& start, std::uint64_t seed) {
  const std::size_t n = p.dim();
  std::map<Point, double> cache;
  Point x = start;
  double fx = p(x);
  cache.emplace(x, fx);
  double poll = s.initial_poll;
  // the seed selects the stretch of the Halton sequence
  const std::uint64_t base_index = 1 + 97 * (seed % 100003);
  for (std::uint64_t k = 0; poll >= s.min_poll && p.remaining() > 0; ++k) {
    bool success = false;
    for (const auto& d : ortho_directions(n, base_index + k)) {
      Point y(n);
      bool inside = true;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] + poll * d[i];
        inside = inside && y[i] >= 0.0 && y[i] <= 1.0;
      }
      if (!inside || cache.count(y)) continue;
      const double fy = p(y);
      cache.emplace(y, fy);
      if (fy < fx) {
        x = std::move(y);
        fx = fy;
        success = true;
        break;
      }
    }
    poll = success ? std::min(2.0 * poll, s.max_poll) : 0.5 * poll;
  }
}

}  // namespace detail

}  // namespace railcal::optim
