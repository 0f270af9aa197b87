#include <algorithm>
#include <cmath>

#include "problem.hpp"

namespace railcal::optim {

double SpsaGains::step(int k) const { return a / std::pow(static_cast<double>(k) + 1.0 + stability, alpha); }

double SpsaGains::perturbation(int k) const { return c / std::pow(static_cast<double>(k) + 1.0, gamma); }

Point spsa_gradient(const std::function<double(const Point&)>& f, const Point& x, double c,
                    std::span<const double> delta) {
  Point plus = x, minus = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] += c * delta[i];
    minus[i] -= c * delta[i];
  }
  const double diff = f(plus) - f(minus);
  Point g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = diff / (2.0 * c * delta[i]);
  return g;
}

namespace detail {

void run_spsa(Problem& p, const SpsaSettings& s, const Point& start, Rng& rng) {
  const SpsaGains gains{s.a, s.c, s.alpha, s.gamma, s.stability_fraction * p.budget()};
  const std::size_t n = p.dim();
  Point x = start;
  p(x);
  for (int k = 0; p.remaining() >= 3; ++k) {
    const double ck = gains.perturbation(k);
    Point delta(n);
    for (auto& d : delta) d = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    // perturbed points are projected into the cube before simulation
    auto g = spsa_gradient([&](const Point& u) { return p(clip_unit(u)); }, x, ck, delta);
    const double ak = gains.step(k);
    for (std::size_t i = 0; i < n; ++i) x[i] -= ak * g[i];
    x = clip_unit(std::move(x));
  }
  if (p.remaining() > 0) p(x);
}

}  // namespace detail

}  // namespace railcal::optim
