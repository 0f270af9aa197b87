#include <algorithm>

#include "problem.hpp"

namespace railcal::optim::detail {

void run_byo(Problem& p, const ByoSettings& s, const Point& start, Rng& rng) {
  const std::size_t n = p.dim();
  std::vector<Point> xs{start};
  std::vector<double> ys{p(start)};
  if (s.initial_points > 1) {
    for (auto& u : latin_hypercube(static_cast<std::size_t>(s.initial_points - 1), n, rng)) {
      ys.push_back(p(u));
      xs.push_back(std::move(u));
    }
  }

  GaussianProcess gp(n, s.jitter);
  std::size_t fitted_at = 0;
  const CompassOptions inner{0.1, 1e-3, 40};
  while (p.remaining() > 0) {
    gp.fit(xs, ys);
    if (fitted_at == 0 || xs.size() >= fitted_at + static_cast<std::size_t>(s.refit_every)) {
      gp.optimize_hyperparameters();
      fitted_at = xs.size();
    }
    const double best = *std::min_element(ys.begin(), ys.end());
    auto key = [&](const Point& u) -> LexKey {
      const auto [m, sd] = gp.predict(u);
      return {0.0, -expected_improvement(m, sd, best, s.xi)};
    };

    Point next;
    double next_ei = -1.0;
    for (int k = 0; k < s.starts; ++k) {
      Point u0(n);
      for (auto& v : u0) v = uniform01(rng);
      Point u = compass_search(key, std::move(u0), inner);
      const double ei = -key(u).second;
      if (ei > next_ei) {
        next_ei = ei;
        next = std::move(u);
      }
    }
    bool repeat = false;
    for (const auto& x : xs) repeat = repeat || sq_dist(x, next) < 1e-18;
    if (repeat) {
      for (auto& v : next) v = uniform01(rng);
    }
    ys.push_back(p(next));
    xs.push_back(std::move(next));
  }
}

}  // namespace railcal::optim::detail
