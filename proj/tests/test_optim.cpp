#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "railcal/error.hpp"
#include "railcal/optim.hpp"

using namespace railcal;
using namespace railcal::optim;

namespace {

Bounds cube(std::size_t n, double lo = 0.0, double hi = 1.0) { return {std::vector<double>(n, lo), std::vector<double>(n, hi)}; }

double sphere(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

OptimizerConfig config_for(Algorithm a, int budget, std::uint64_t seed) {
  OptimizerConfig c;
  c.algorithm = a;
  c.budget = budget;
  c.seed = seed;
  return c;
}

bool near(const Point& a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(b[i]))) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("names round-trip and only NMSA is deterministic") {
  for (auto a : kAllAlgorithms) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
    CHECK(is_deterministic(a) == (a == Algorithm::NMSA));
  }
  CHECK(parse_algorithm("cors") == Algorithm::CORS);
  CHECK_THROWS_AS(parse_algorithm("annealing"), ConfigError);
}

TEST_CASE("budget of one evaluates the start only") {
  const auto b = cube(3, -1, 1);
  const std::vector<double> start{0.2, -0.3, 0.4};
  for (auto a : kAllAlgorithms) {
    INFO(algorithm_name(a));
    const auto r = optimize(config_for(a, 1, 3), sphere, b, start);
    REQUIRE(r.trace.evaluations.size() == 1);
    CHECK(near(r.trace.evaluations[0].theta, start));
    CHECK(near(r.best, start));
    CHECK(r.best_value == doctest::Approx(0.29));
  }
}

TEST_CASE("invalid inputs are rejected") {
  const auto b = cube(2);
  CHECK_THROWS_AS(optimize(config_for(Algorithm::GA, 0, 1), sphere, b, std::vector<double>{0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(optimize(config_for(Algorithm::GA, 5, 1), sphere, b, std::vector<double>{1.5, 0.5}), BoundsError);
}

TEST_CASE("every algorithm: budget, bounds, monotone best and replay") {
  const Bounds b{{-5, -5, -5, -5}, {5, 5, 5, 5}};
  const std::vector<double> start{3, -2, 4, 1};
  auto f = [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += (v - 1) * (v - 1);
    return s;
  };
  for (auto a : kAllAlgorithms) {
    INFO(algorithm_name(a));
    int calls = 0;
    auto counted = [&](std::span<const double> x) {
      ++calls;
      return f(x);
    };
    const auto r = optimize(config_for(a, 40, 11), counted, b, start);
    const auto& ev = r.trace.evaluations;
    CHECK(calls <= 40);
    CHECK(static_cast<int>(ev.size()) >= calls);
    CHECK(ev.size() <= 40);
    CHECK(near(ev.front().theta, start));
    double best = INFINITY;
    bool monotone = true, in_box = true;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      CHECK(ev[i].index == i + 1);
      best = std::min(best, ev[i].value);
      monotone = monotone && ev[i].best_so_far == best && (i == 0 || ev[i].best_so_far <= ev[i - 1].best_so_far);
      if (ev[i].value < 1e11) in_box = in_box && b.contains(ev[i].theta);
    }
    CHECK(monotone);
    CHECK(in_box);
    CHECK(r.best_value == best);
    CHECK(b.contains(r.best));
    CHECK(r.best_value < f(start));

    const auto again = optimize(config_for(a, 40, 11), f, b, start);
    REQUIRE(again.trace.evaluations.size() == ev.size());
    bool same = true;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      same = same && again.trace.evaluations[i].theta == ev[i].theta && again.trace.evaluations[i].value == ev[i].value;
    }
    CHECK(same);
    if (!is_deterministic(a)) {
      const auto other = optimize(config_for(a, 40, 12), f, b, start);
      bool differs = other.trace.evaluations.size() != ev.size();
      for (std::size_t i = 0; !differs && i < ev.size(); ++i) differs = other.trace.evaluations[i].theta != ev[i].theta;
      CHECK(differs);
    }
  }
}

// ---------------------------------------------------------------------------
// GA

TEST_CASE("GA: zero probabilities leave parents untouched") {
  Rng rng(1);
  GaSettings s;
  s.crossover_prob = 0;
  s.mutation_prob = 0;
  const std::vector<Point> parents{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}, {0.7, 0.8}};
  CHECK(ga_vary(parents, s, rng) == parents);
}

TEST_CASE("GA: blending identical parents reproduces them") {
  Rng rng(2);
  const Point a{0.25, 0.5, 0.75};
  for (int i = 0; i < 50; ++i) {
    auto [c1, c2] = blend_crossover(a, a, 0.5, rng);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(c1[k] == doctest::Approx(a[k]).epsilon(1e-15));
      CHECK(c2[k] == doctest::Approx(a[k]).epsilon(1e-15));
    }
  }
}

TEST_CASE("GA: blend children lie within the extended segment and mirror each other") {
  Rng rng(3);
  const Point a{0.2}, b{0.6};
  for (int i = 0; i < 500; ++i) {
    auto [c1, c2] = blend_crossover(a, b, 0.5, rng);
    CHECK(c1[0] >= 0.0 - 1e-15);
    CHECK(c1[0] <= 0.8 + 1e-15);
    CHECK(c1[0] + c2[0] == doctest::Approx(0.8));
  }
}

TEST_CASE("GA: varied children stay in the cube") {
  Rng rng(4);
  GaSettings s;
  s.mutation_prob = 1;
  s.gene_mutation_prob = 1;
  s.mutation_sigma = 5;
  std::vector<Point> parents(6, Point{0.0, 1.0, 0.5});
  for (const auto& k : ga_vary(parents, s, rng)) {
    for (double v : k) CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("GA: tournament of the whole population finds the best often") {
  Rng rng(5);
  const std::vector<double> fit{5, 1, 3, 4};
  int hits = 0;
  for (int i = 0; i < 2000; ++i) hits += tournament_select(fit, 8, rng) == 1;
  CHECK(hits > 1700);  // misses with probability (3/4)^8
  CHECK(tournament_select(std::vector<double>{2.0}, 2, rng) == 0);
}

TEST_CASE("GA: population plus whole generations within budget") {
  const auto b = cube(2);
  const auto r = optimize(config_for(Algorithm::GA, 30, 1), sphere, b, std::vector<double>{0.5, 0.5});
  CHECK(r.trace.evaluations.size() == 30);  // 6 initial + 4 generations of 6
}

// ---------------------------------------------------------------------------
// SA

TEST_CASE("SA: improvements always accepted, worse moves less likely when cold") {
  CHECK(sa_acceptance_probability(-1.0, 1.0, -5.0) == 1.0);
  CHECK(sa_acceptance_probability(0.0, 1.0, -5.0) == 1.0);
  const double cold = sa_acceptance_probability(1.0, 1.0, -5.0);
  const double hot = sa_acceptance_probability(1.0, 1000.0, -5.0);
  CHECK(cold < hot);
  CHECK(hot < 1.0);
  CHECK(cold >= 0.0);
  // 1 - (1 - qa) dz / T = 1 - 6 * 1 / 1000, raised to 1 / (1 - qa)
  CHECK(hot == doctest::Approx(std::pow(0.994, 1.0 / 6.0)).epsilon(1e-14));
}

TEST_CASE("SA: temperature starts at the initial value and decreases") {
  CHECK(sa_temperature(5230, 2.62, 0) == doctest::Approx(5230));
  double prev = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const double t = sa_temperature(5230, 2.62, i);
    CHECK(t < prev);
    CHECK(t > 0);
    prev = t;
  }
}

TEST_CASE("SA: proposals wrap into the unit interval") {
  Rng rng(6);
  const SaVisiting v(2.62);
  const Point x{0.99, 0.01, 0.5};
  for (std::size_t step = 0; step < 6; ++step) {
    const auto y = v.propose(x, step, 5230.0, rng);
    for (double c : y) CHECK((c >= 0.0 && c < 1.0));
    if (step >= 3) {
      for (std::size_t d = 0; d < 3; ++d) {
        if (d != step - 3) CHECK(y[d] == x[d]);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Nelder-Mead

TEST_CASE("NM: reflection through the centroid") {
  CHECK(nm_affine({0.5, 0.5}, {0.0, 0.0}, 1.0) == Point{1.0, 1.0});
  CHECK(nm_affine({0.5, 0.5}, {0.0, 0.0}, -0.5) == Point{0.25, 0.25});
  // a tilted plane: the reflected point beats every vertex but expansion is not better
  Simplex s{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {}};
  auto f = [](const Point& x) { return std::abs(x[0] - 1.0) + std::abs(x[1] - 1.0); };
  for (const auto& v : s.vertices) s.values.push_back(f(v));
  NmsaSettings c;
  const auto move = nm_iteration(s, f, c);
  CHECK(move == NmMove::Reflect);
  CHECK(std::find(s.vertices.begin(), s.vertices.end(), Point{1.0, 1.0}) != s.vertices.end());
}

TEST_CASE("NM: a flat function shrinks toward the best vertex") {
  Simplex s{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {1.0, 1.0, 1.0}};
  auto f = [](const Point&) { return 1.0; };
  const double d0 = simplex_diameter(s);
  const auto move = nm_iteration(s, f, NmsaSettings{});
  CHECK(move == NmMove::Shrink);
  CHECK(simplex_diameter(s) == doctest::Approx(d0 / 2));
  CHECK(s.vertices[0] == Point{0.0, 0.0});
}

TEST_CASE("NM: diameter never grows on a convex bowl once contracting") {
  Simplex s{{{0.3, 0.3}, {0.35, 0.3}, {0.3, 0.35}}, {}};
  auto f = [](const Point& x) { return (x[0] - 0.31) * (x[0] - 0.31) + 2 * (x[1] - 0.32) * (x[1] - 0.32); };
  for (const auto& v : s.vertices) s.values.push_back(f(v));
  double best = *std::min_element(s.values.begin(), s.values.end());
  for (int i = 0; i < 60; ++i) {
    nm_iteration(s, f, NmsaSettings{});
    const double now = *std::min_element(s.values.begin(), s.values.end());
    CHECK(now <= best);
    best = now;
  }
  CHECK(best < 1e-6);
}

// ---------------------------------------------------------------------------
// MADS

TEST_CASE("MADS: directions form a positive spanning set") {
  for (std::size_t n : {1u, 2u, 7u}) {
    for (std::uint64_t k : {1u, 5u, 98u}) {
      const auto dirs = ortho_directions(n, k);
      REQUIRE(dirs.size() == n + 1);
      // first n columns orthonormal
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double dot = 0;
          for (std::size_t c = 0; c < n; ++c) dot += dirs[i][c] * dirs[j][c];
          CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
        }
      }
      // the last is a unit vector with negative inner product against all others' sum
      double norm = 0, dot_sum = 0;
      for (std::size_t c = 0; c < n; ++c) {
        norm += dirs[n][c] * dirs[n][c];
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += dirs[i][c];
        dot_sum += s * dirs[n][c];
      }
      CHECK(norm == doctest::Approx(1.0));
      CHECK(dot_sum < 0);
    }
  }
}

TEST_CASE("MADS: Halton radical inverse") {
  CHECK(halton(1, 2) == 0.5);
  CHECK(halton(2, 2) == 0.25);
  CHECK(halton(3, 2) == 0.75);
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3));
  CHECK(halton(5, 3) == doctest::Approx(2.0 / 3 + 1.0 / 9));
}

TEST_CASE("MADS: unsuccessful polls halve the step") {
  // a minimum exactly at the start: every poll fails
  const auto b = cube(2);
  auto f = [](std::span<const double> x) { return (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5); };
  const auto r = optimize(config_for(Algorithm::MADS, 13, 1), f, b, std::vector<double>{0.5, 0.5});
  const auto& ev = r.trace.evaluations;
  REQUIRE(ev.size() == 13);
  // polls of 3 directions at 0.1, 0.05, 0.025, 0.0125
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const double d = std::hypot(ev[i].theta[0] - 0.5, ev[i].theta[1] - 0.5);
    const double expect = 0.1 / std::pow(2.0, static_cast<double>((i - 1) / 3));
    CHECK(d == doctest::Approx(expect).epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// SPSA

TEST_CASE("SPSA: gain sequences at the defaults") {
  const SpsaSettings s;
  const SpsaGains g{s.a, s.c, s.alpha, s.gamma, s.stability_fraction * 100};
  CHECK(g.step(0) == doctest::Approx(0.001 / std::pow(11.0, 0.602)).epsilon(1e-14));
  CHECK(std::abs(g.step(0) - 2.361e-4) < 1e-7);
  CHECK(g.perturbation(0) == 0.007);
  CHECK(g.step(10) < g.step(0));
  CHECK(g.perturbation(10) < g.perturbation(0));
}

TEST_CASE("SPSA: gradient estimate is exact along the perturbation for a quadratic") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 7);
    Point a(n), b(n), x(n), delta(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = uniform(rng, 0.1, 3);
      b[i] = uniform(rng, -1, 1);
      x[i] = uniform(rng, -1, 1);
      delta[i] = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    }
    auto f = [&](const Point& u) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += a[i] * u[i] * u[i] + b[i] * u[i];
      return s;
    };
    double dir = 0;  // grad . delta
    for (std::size_t i = 0; i < n; ++i) dir += (2 * a[i] * x[i] + b[i]) * delta[i];
    const auto g = spsa_gradient(f, x, 0.01, delta);
    for (std::size_t i = 0; i < n; ++i) CHECK(g[i] == doctest::Approx(dir / delta[i]).epsilon(1e-8));
  }
}

TEST_CASE("SPSA: spends the budget in pairs plus a final evaluation") {
  const auto b = cube(3);
  const auto r = optimize(config_for(Algorithm::SPSA, 100, 2), sphere, b, std::vector<double>{0.5, 0.5, 0.5});
  CHECK(r.trace.evaluations.size() == 100);  // start, 49 pairs, final iterate
}

// ---------------------------------------------------------------------------
// Surrogates

TEST_CASE("GP interpolates its data and is uncertain away from it") {
  Rng rng(9);
  std::vector<Point> x;
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    Point p{uniform01(rng), uniform01(rng)};
    y.push_back(std::sin(3 * p[0]) + p[1] * p[1]);
    x.push_back(std::move(p));
  }
  GaussianProcess gp(2, 1e-10);
  gp.fit(x, y);
  gp.optimize_hyperparameters();
  CHECK(std::isfinite(gp.log_marginal_likelihood()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto [m, sd] = gp.predict(x[i]);
    CHECK(m == doctest::Approx(y[i]).epsilon(1e-4).scale(1.0));
    CHECK(sd < 1e-2);
  }
  const auto far = gp.predict(Point{5.0, 5.0});
  CHECK(far.second > 0.1);
}

TEST_CASE("expected improvement") {
  CHECK(expected_improvement(1.0, 0.0, 1.0, 0.0) == 0.0);
  CHECK(expected_improvement(2.0, 0.0, 1.0, 0.0) == 0.0);
  CHECK(expected_improvement(0.5, 0.0, 1.0, 0.0) == 0.5);
  // at the incumbent: sd * pdf(0)
  CHECK(expected_improvement(1.0, 2.0, 1.0, 0.0) == doctest::Approx(2.0 / std::sqrt(2 * std::numbers::pi)));
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    CHECK(expected_improvement(uniform(rng, -3, 3), uniform(rng, 0, 2), uniform(rng, -3, 3), uniform(rng, 0, 0.1)) >=
          0.0);
  }
}

TEST_CASE("cubic RBF interpolates random data") {
  Rng rng(11);
  for (std::size_t dim : {1u, 3u, 7u}) {
    std::vector<Point> x;
    std::vector<double> y;
    for (int i = 0; i < 10 + static_cast<int>(dim); ++i) {
      Point p(dim);
      for (auto& v : p) v = uniform01(rng);
      y.push_back(uniform(rng, -5, 5));
      x.push_back(std::move(p));
    }
    CubicRbf rbf;
    rbf.fit(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(rbf(x[i]) == doctest::Approx(y[i]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("cubic RBF reproduces a linear function everywhere") {
  std::vector<Point> x{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.2}};
  std::vector<double> y;
  for (const auto& p : x) y.push_back(2 + 3 * p[0] - p[1]);
  CubicRbf rbf;
  rbf.fit(x, y);
  CHECK(rbf(Point{0.3, 0.7}) == doctest::Approx(2 + 0.9 - 0.7));
}

TEST_CASE("CORS: start plus a Latin hypercube for the initial fifth of the budget") {
  const auto b = cube(3);
  const auto r = optimize(config_for(Algorithm::CORS, 100, 4), sphere, b, std::vector<double>{0.5, 0.5, 0.5});
  const auto& ev = r.trace.evaluations;
  REQUIRE(ev.size() == 100);
  CHECK(ev[0].theta == Point{0.5, 0.5, 0.5});
  for (std::size_t d = 0; d < 3; ++d) {
    std::set<int> strata;
    for (std::size_t i = 1; i < 20; ++i) strata.insert(static_cast<int>(std::floor(ev[i].theta[d] * 19)));
    CHECK(strata.size() == 19);
  }
}

TEST_CASE("CORS: converges on a sphere") {
  const auto b = cube(7, -5, 5);
  const auto r = optimize(config_for(Algorithm::CORS, 100, 1), sphere, b, std::vector<double>(7, 4.0));
  CHECK(r.best_value <= 0.5);
}

TEST_CASE("Latin hypercube and compass search") {
  Rng rng(12);
  const auto pts = latin_hypercube(10, 4, rng);
  for (std::size_t d = 0; d < 4; ++d) {
    std::set<int> strata;
    for (const auto& p : pts) strata.insert(static_cast<int>(p[d] * 10));
    CHECK(strata.size() == 10);
  }
  auto key = [](const Point& x) -> LexKey { return {0.0, (x[0] - 0.3) * (x[0] - 0.3) + (x[1] - 0.8) * (x[1] - 0.8)}; };
  const auto x = compass_search(key, {0.9, 0.1}, CompassOptions{});
  CHECK(x[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(x[1] == doctest::Approx(0.8).epsilon(1e-3));
  CHECK(clip_unit({-0.5, 0.5, 1.5}) == Point{0.0, 0.5, 1.0});
}

}  // TEST_SUITE
