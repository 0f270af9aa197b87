#include <algorithm>
#include <cctype>
#include <cstdio>

#include "problem.hpp"
#include "railcal/error.hpp"

namespace railcal::optim {

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::GA: return "GA";
    case Algorithm::SA: return "SA";
    case Algorithm::NMSA: return "NMSA";
    case Algorithm::MADS: return "MADS";
    case Algorithm::SPSA: return "SPSA";
    case Algorithm::BYO: return "BYO";
    case Algorithm::CORS: return "CORS";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string upper(name);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (auto a : kAllAlgorithms) {
    if (algorithm_name(a) == upper) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected GA, SA, NMSA, MADS, SPSA, BYO or CORS)");
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> describe(const OptimizerConfig& c) {
  std::vector<std::pair<std::string, std::string>> out{{"algorithm", std::string(algorithm_name(c.algorithm))},
                                                       {"budget", std::to_string(c.budget)},
                                                       {"seed", std::to_string(c.seed)}};
  auto put = [&](const char* k, double v) { out.emplace_back(k, num(v)); };
  switch (c.algorithm) {
    case Algorithm::GA:
      put("population", c.ga.population);
      put("crossover_prob", c.ga.crossover_prob);
      put("mutation_prob", c.ga.mutation_prob);
      put("gene_mutation_prob", c.ga.gene_mutation_prob);
      put("blend_alpha", c.ga.blend_alpha);
      put("mutation_sigma", c.ga.mutation_sigma);
      put("tournament_size", c.ga.tournament_size);
      break;
    case Algorithm::SA:
      put("visiting", c.sa.visiting);
      put("acceptance", c.sa.acceptance);
      put("initial_temp", c.sa.initial_temp);
      put("restart_temp_ratio", c.sa.restart_temp_ratio);
      break;
    case Algorithm::NMSA:
      put("initial_step", c.nmsa.initial_step);
      put("reflection", c.nmsa.reflection);
      put("expansion", c.nmsa.expansion);
      put("contraction", c.nmsa.contraction);
      put("shrink", c.nmsa.shrink);
      put("penalty", c.nmsa.penalty);
      break;
    case Algorithm::MADS:
      put("initial_poll", c.mads.initial_poll);
      put("max_poll", c.mads.max_poll);
      put("min_poll", c.mads.min_poll);
      break;
    case Algorithm::SPSA:
      put("a", c.spsa.a);
      put("c", c.spsa.c);
      put("alpha", c.spsa.alpha);
      put("gamma", c.spsa.gamma);
      put("stability_fraction", c.spsa.stability_fraction);
      break;
    case Algorithm::BYO:
      put("initial_points", c.byo.initial_points);
      put("refit_every", c.byo.refit_every);
      put("jitter", c.byo.jitter);
      put("starts", c.byo.starts);
      put("xi", c.byo.xi);
      break;
    case Algorithm::CORS: {
      put("initial_fraction", c.cors.initial_fraction);
      std::string cycle;
      for (double b : c.cors.distance_cycle) cycle += (cycle.empty() ? "" : " ") + num(b);
      out.emplace_back("distance_cycle", cycle);
      put("candidates", c.cors.candidates);
      put("starts", c.cors.starts);
      put("min_distance", c.cors.min_distance);
      break;
    }
  }
  return out;
}

Point clip_unit(Point x) {
  for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
  return x;
}

std::vector<Point> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<Point> pts(n, Point(dim));
  std::vector<std::size_t> perm(n);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i][d] = (static_cast<double>(perm[i]) + uniform01(rng)) / static_cast<double>(n);
    }
  }
  return pts;
}

namespace detail {

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace detail

}  // namespace railcal::optim
