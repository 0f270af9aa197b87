#include <algorithm>
#include <cmath>

#include "problem.hpp"

namespace railcal::optim {

Point compass_search(const std::function<LexKey(const Point&)>& key, Point x, const CompassOptions& opt) {
  x = clip_unit(std::move(x));
  LexKey best = key(x);
  int evals = 1;
  double step = opt.initial_step;
  while (step >= opt.min_step && evals < opt.max_evals) {
    bool improved = false;
    for (std::size_t d = 0; d < x.size() && evals < opt.max_evals; ++d) {
      for (double sign : {1.0, -1.0}) {
        const double v = std::clamp(x[d] + sign * step, 0.0, 1.0);
        if (v == x[d]) continue;
        Point y = x;
        y[d] = v;
        const LexKey k = key(y);
        ++evals;
        if (k < best) {
          best = k;
          x = std::move(y);
          improved = true;
          break;
        }
        if (evals >= opt.max_evals) break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

}  // namespace railcal::optim

namespace railcal::optim::detail {

namespace {

Point fd_gradient(const std::function<double(const Point&)>& f, const Point& x, double fx) {
  constexpr double h = 1.4901161193847656e-08;
  Point g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Point y = x;
    const double step = x[i] + h <= 1.0 ? h : -h;
    y[i] += step;
    g[i] = (f(y) - fx) / step;
  }
  return g;
}

}  // namespace

std::pair<Point, double> bounded_bfgs(const std::function<double(const Point&)>& f, Point x, double fx,
                                      int max_iter) {
  const std::size_t n = x.size();
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  Point g = fd_gradient(f, x, fx);

  for (int it = 0; it < max_iter; ++it) {
    double pg = 0.0;
    for (std::size_t i = 0; i < n; ++i) pg = std::max(pg, std::fabs(std::clamp(x[i] - g[i], 0.0, 1.0) - x[i]));
    if (pg < 1e-5) break;

    Point d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i] -= h[i * n + j] * g[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if ((x[i] <= 0.0 && d[i] < 0.0) || (x[i] >= 1.0 && d[i] > 0.0)) d[i] = 0.0;
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = (x[i] <= 0.0 && g[i] > 0.0) || (x[i] >= 1.0 && g[i] < 0.0) ? 0.0 : -g[i];
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
      if (!(slope < 0.0)) break;
    }

    Point xn;
    double fn = fx;
    bool moved = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      xn = x;
      for (std::size_t i = 0; i < n; ++i) xn[i] = std::clamp(x[i] + t * d[i], 0.0, 1.0);
      fn = f(xn);
      if (fn <= fx + 1e-4 * t * slope) {
        moved = true;
        break;
      }
    }
    if (!moved) break;

    Point gn = fd_gradient(f, xn, fn);
    Point s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
      sy += s[i] * y[i];
    }
    const double rel = (fx - fn) / std::max({std::fabs(fx), std::fabs(fn), 1.0});
    x = std::move(xn);
    g = std::move(gn);
    const double f_prev = fx;
    fx = fn;
    if (rel <= 2.220446049250313e-09 && f_prev >= fn) break;
    if (sy > 1e-10) {
      // inverse BFGS update
      Point hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += h[i * n + j] * y[j];
      }
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    }
  }
  return {x, fx};
}

}  // namespace railcal::optim::detail
