#include <algorithm>
#include <cmath>
#include <numeric>

#include "problem.hpp"

namespace railcal::optim::detail {

void run_cors(Problem& p, const CorsSettings& s, const Point& start, Rng& rng) {
  const std::size_t n = p.dim();
  int n_init = std::max(static_cast<int>(std::lround(s.initial_fraction * p.budget())), static_cast<int>(n) + 2);
  n_init = std::min(n_init, p.budget());

  std::vector<Point> xs{start};
  std::vector<double> ys{p(start)};
  kernels::PointSet seen(n);
  seen.add(start);
  for (auto& u : latin_hypercube(static_cast<std::size_t>(std::max(n_init - 1, 0)), n, rng)) {
    ys.push_back(p(u));
    seen.add(u);
    xs.push_back(std::move(u));
  }

  std::vector<double> d2;
  auto nearest = [&](const Point& u) {
    d2.resize(seen.size());
    seen.sq_dist(u, d2);
    return std::sqrt(*std::min_element(d2.begin(), d2.end()));
  };

  CubicRbf surrogate;
  const CompassOptions inner{0.05, 1e-4, 300};
  for (std::size_t k = 0; p.remaining() > 0; ++k) {
    // values above the median are capped before fitting
    std::vector<double> fy = ys;
    std::vector<double> sorted = ys;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (auto& v : fy) v = std::min(v, median);
    surrogate.fit(xs, fy);

    const double beta = s.distance_cycle.empty() ? 0.0 : s.distance_cycle[k % s.distance_cycle.size()];
    std::vector<Point> cands(static_cast<std::size_t>(std::max(s.candidates, 1)), Point(n));
    double spread = 0.0;
    for (auto& c : cands) {
      for (auto& v : c) v = uniform01(rng);
      spread = std::max(spread, nearest(c));
    }
    const double radius = std::max(beta * spread, s.min_distance);
    auto key = [&](const Point& u) -> LexKey { return {std::max(0.0, radius - nearest(u)), surrogate(u)}; };

    std::vector<LexKey> keys;
    for (const auto& c : cands) keys.push_back(key(c));
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    const auto take = std::min(order.size(), static_cast<std::size_t>(std::max(s.starts - 1, 0)));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](auto a, auto b) { return keys[a] < keys[b]; });

    std::vector<Point> starts{xs[static_cast<std::size_t>(std::min_element(ys.begin(), ys.end()) - ys.begin())]};
    for (std::size_t i = 0; i < take; ++i) starts.push_back(cands[order[i]]);

    Point next;
    LexKey next_key{INFINITY, INFINITY};
    for (auto& u0 : starts) {
      Point u = compass_search(key, u0, inner);
      const LexKey kk = key(u);
      if (kk < next_key) {
        next_key = kk;
        next = std::move(u);
      }
    }
    ys.push_back(p(next));
    seen.add(next);
    xs.push_back(std::move(next));
  }
}

}  // namespace railcal::optim::detail
