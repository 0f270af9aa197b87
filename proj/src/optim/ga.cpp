#include <algorithm>
#include <numeric>

#include "problem.hpp"

namespace railcal::optim {

std::pair<Point, Point> blend_crossover(const Point& a, const Point& b, double alpha, Rng& rng) {
  Point c1(a.size()), c2(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double g = (1.0 + 2.0 * alpha) * uniform01(rng) - alpha;
    c1[i] = (1.0 - g) * a[i] + g * b[i];
    c2[i] = g * a[i] + (1.0 - g) * b[i];
  }
  return {c1, c2};
}

void gaussian_mutation(Point& x, double sigma, double gene_prob, Rng& rng) {
  for (auto& v : x) {
    if (uniform01(rng) < gene_prob) v += sigma * normal01(rng);
  }
}

std::size_t tournament_select(std::span<const double> fitness, int size, Rng& rng) {
  std::size_t best = uniform_index(rng, fitness.size());
  for (int k = 1; k < size; ++k) {
    const std::size_t c = uniform_index(rng, fitness.size());
    if (fitness[c] < fitness[best]) best = c;
  }
  return best;
}

std::vector<Point> ga_vary(std::vector<Point> kids, const GaSettings& s, Rng& rng) {
  for (std::size_t i = 1; i < kids.size(); i += 2) {
    if (uniform01(rng) < s.crossover_prob) {
      auto [c1, c2] = blend_crossover(kids[i - 1], kids[i], s.blend_alpha, rng);
      kids[i - 1] = std::move(c1);
      kids[i] = std::move(c2);
    }
  }
  for (auto& k : kids) {
    if (uniform01(rng) < s.mutation_prob) gaussian_mutation(k, s.mutation_sigma, s.gene_mutation_prob, rng);
    k = clip_unit(std::move(k));
  }
  return kids;
}

namespace detail {

void run_ga(Problem& p, const GaSettings& s, const Point& start, Rng& rng) {
  const auto n = static_cast<std::size_t>(std::max(s.population, 2));
  std::vector<Point> pop{start};
  while (pop.size() < n) {
    Point x(p.dim());
    for (auto& v : x) v = uniform01(rng);
    pop.push_back(std::move(x));
  }
  std::vector<double> fit;
  for (const auto& x : pop) fit.push_back(p(x));

  while (p.remaining() > 0) {
    std::vector<Point> parents;
    for (std::size_t i = 0; i < n; ++i) parents.push_back(pop[tournament_select(fit, s.tournament_size, rng)]);
    auto kids = ga_vary(std::move(parents), s, rng);
    std::vector<double> kid_fit;
    for (const auto& x : kids) kid_fit.push_back(p(x));

    // survivors: best n of parents and children together
    std::vector<std::size_t> idx(2 * n);
    std::iota(idx.begin(), idx.end(), 0);
    auto value = [&](std::size_t i) { return i < n ? fit[i] : kid_fit[i - n]; };
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return value(a) < value(b); });
    std::vector<Point> next;
    std::vector<double> next_fit;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = idx[k];
      next.push_back(i < n ? pop[i] : kids[i - n]);
      next_fit.push_back(value(i));
    }
    pop = std::move(next);
    fit = std::move(next_fit);
  }
}

}  // namespace detail

}  // namespace railcal::optim
