#include <algorithm>
#include <cmath>
#include <numeric>

#include "problem.hpp"

namespace railcal::optim {

Point nm_affine(const Point& centroid, const Point& worst, double t) {
  Point r(centroid.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = centroid[i] + t * (centroid[i] - worst[i]);
  return r;
}

double simplex_diameter(const Simplex& s) {
  double d = 0.0;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < s.vertices.size(); ++j) d = std::max(d, detail::sq_dist(s.vertices[i], s.vertices[j]));
  }
  return std::sqrt(d);
}

namespace {

void order(Simplex& s) {
  std::vector<std::size_t> idx(s.vertices.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.values[a] < s.values[b]; });
  Simplex o;
  for (auto i : idx) {
    o.vertices.push_back(std::move(s.vertices[i]));
    o.values.push_back(s.values[i]);
  }
  s = std::move(o);
}

}  // namespace

NmMove nm_iteration(Simplex& s, const std::function<double(const Point&)>& f, const NmsaSettings& c) {
  order(s);
  const std::size_t n = s.vertices.size() - 1;
  Point centroid(s.vertices[0].size(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < centroid.size(); ++i) centroid[i] += s.vertices[k][i] / static_cast<double>(n);
  }
  const Point& worst = s.vertices[n];

  auto replace_worst = [&](Point x, double z) {
    s.vertices[n] = std::move(x);
    s.values[n] = z;
  };

  Point xr = nm_affine(centroid, worst, c.reflection);
  const double fr = f(xr);
  if (fr < s.values[0]) {
    Point xe = nm_affine(centroid, worst, c.reflection * c.expansion);
    const double fe = f(xe);
    if (fe < fr) {
      replace_worst(std::move(xe), fe);
      return NmMove::Expand;
    }
    replace_worst(std::move(xr), fr);
    return NmMove::Reflect;
  }
  if (fr < s.values[n - 1]) {
    replace_worst(std::move(xr), fr);
    return NmMove::Reflect;
  }
  if (fr < s.values[n]) {
    Point xc = nm_affine(centroid, worst, c.contraction * c.reflection);
    const double fc = f(xc);
    if (fc <= fr) {
      replace_worst(std::move(xc), fc);
      return NmMove::ContractOutside;
    }
  } else {
    Point xcc = nm_affine(centroid, worst, -c.contraction);
    const double fcc = f(xcc);
    if (fcc < s.values[n]) {
      replace_worst(std::move(xcc), fcc);
      return NmMove::ContractInside;
    }
  }
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < centroid.size(); ++i) {
      s.vertices[k][i] = s.vertices[0][i] + c.shrink * (s.vertices[k][i] - s.vertices[0][i]);
    }
    s.values[k] = f(s.vertices[k]);
  }
  return NmMove::Shrink;
}

namespace detail {

void run_nmsa(Problem& p, const NmsaSettings& c, const Point& start) {
  auto f = [&](const Point& u) { return p.penalized(u, c.penalty); };
  Simplex s;
  s.vertices.push_back(start);
  s.values.push_back(f(start));
  for (std::size_t i = 0; i < p.dim(); ++i) {
    Point v = start;
    v[i] += c.initial_step;
    s.values.push_back(f(v));
    s.vertices.push_back(std::move(v));
  }
  while (p.remaining() > 0) {
    nm_iteration(s, f, c);
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    if (simplex_diameter(s) < 1e-12 && *hi - *lo <= 0.0) break;
  }
}

}  // namespace detail

}  // namespace railcal::optim
