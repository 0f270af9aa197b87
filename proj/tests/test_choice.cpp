#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "railcal/choice.hpp"
#include "railcal/error.hpp"
#include "railcal/rng.hpp"

using namespace railcal;

namespace {

Path path_of(std::vector<StationIndex> s) {
  Path p;
  p.stations = std::move(s);
  return p;
}

ChoiceParams params(double ivt, double walk, double transfers, double cf) {
  ChoiceParams c;
  c.beta_x = {ivt, walk, transfers};
  c.beta_cf = cf;
  return c;
}

// Independent long-double logit over parallel paths (every pair shares 2 of 3 stations).
std::vector<long double> oracle(const std::vector<AttributeVector>& x, const ChoiceParams& p) {
  const auto k = static_cast<long double>(x.size());
  const long double cf = std::log((3.0L + 2.0L * (k - 1.0L)) / 9.0L);
  std::vector<long double> u;
  for (const auto& a : x) {
    u.push_back(p.beta_x[0] * static_cast<long double>(a[0]) + p.beta_x[1] * static_cast<long double>(a[1]) +
                p.beta_x[2] * static_cast<long double>(a[2]) + p.beta_cf * cf);
  }
  const long double m = *std::max_element(u.begin(), u.end());
  long double z = 0;
  for (auto& v : u) z += (v = std::exp(v - m));
  for (auto& v : u) v /= z;
  return u;
}

}  // namespace

TEST_SUITE("choice") {

TEST_CASE("commonality factor of a singleton set") {
  const auto p = path_of({0, 1, 2, 3, 4});
  const std::vector<Path> set{p};
  CHECK(commonality_factor(p, set, 1.0) == doctest::Approx(-std::log(5.0)).epsilon(1e-14));
  CHECK(commonality_factor(p, set, 2.0) == doctest::Approx(-2.0 * std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("commonality factor of two paths sharing only their ends") {
  const std::vector<Path> set{path_of({0, 1, 2, 9}), path_of({0, 3, 4, 9})};
  CHECK(commonality_factor(set[0], set, 1.0) == doctest::Approx(std::log(0.375)).epsilon(1e-14));
  CHECK(commonality_factor(set[1], set, 1.0) == doctest::Approx(std::log(0.375)).epsilon(1e-14));
}

TEST_CASE("commonality factor of identical paths is symmetric") {
  const std::vector<Path> set{path_of({0, 1, 2}), path_of({0, 1, 2})};
  CHECK(commonality_factor(set[0], set, 1.0) == commonality_factor(set[1], set, 1.0));
}

TEST_CASE("commonality factor of an empty set is a domain error") {
  CHECK_THROWS_AS(commonality_factor(path_of({0, 1}), {}, 1.0), DomainError);
}

TEST_CASE("single path has probability one") {
  const auto net = testing::parallel_paths({{30, 1, 2}});
  for (auto p : {params(-0.147, -1.271, -0.573, -3.679), params(-2, -5, -3, -10), params(0, 0, 0, 0)}) {
    const auto pr = choice_probabilities(net, 0, 1, 1, p);
    REQUIRE(pr.size() == 1);
    CHECK(pr[0] == 1.0);
  }
}

TEST_CASE("identical paths split evenly") {
  const auto net = testing::parallel_paths({{20, 0.3, 1}, {20, 0.3, 1}});
  const auto pr = choice_probabilities(net, 0, 1, 1, params(-1.3, -2.2, -0.4, -7));
  CHECK(pr[0] == 0.5);
  CHECK(pr[1] == 0.5);
}

TEST_CASE("reference coefficients: two-path logit against a hand oracle") {
  const auto net = testing::parallel_paths({{20, 0.1, 0}, {25, 0.1, 1}});
  const auto pr = choice_probabilities(net, 0, 1, 1, params(-0.147, -1.271, -0.573, -3.679));
  const long double v = 0.147L * 5.0L + 0.573L;
  const long double p1 = 1.0L / (1.0L + std::exp(-v));
  CHECK(pr[0] == doctest::Approx(static_cast<double>(p1)).epsilon(1e-14));
  CHECK(pr[1] == doctest::Approx(static_cast<double>(1.0L - p1)).epsilon(1e-14));
}

TEST_CASE("probabilities normalise for random coefficients and attributes") {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto k = 1 + uniform_index(rng, 5);
    std::vector<AttributeVector> x(k);
    for (auto& a : x) a = {uniform(rng, 1, 120), uniform(rng, 0, 3), std::floor(uniform(rng, 0, 4))};
    const auto p = params(uniform(rng, -2, 0), uniform(rng, -5, 0), uniform(rng, -3, 0), uniform(rng, -10, 0));
    const auto net = testing::parallel_paths(x);
    const auto pr = choice_probabilities(net, 0, 1, 1, p);
    const auto ref = oracle(x, p);
    const double sum = std::accumulate(pr.begin(), pr.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(pr[i] - static_cast<double>(ref[i])) <= 1e-12);
  }
}

TEST_CASE("lower-bound coefficients stay finite on extreme attributes") {
  const auto net = testing::parallel_paths({{600, 10, 6}, {5, 0, 0}, {900, 40, 9}});
  const auto pr = choice_probabilities(net, 0, 1, 1, params(-2, -5, -3, -10));
  double sum = 0;
  for (double v : pr) {
    CHECK(std::isfinite(v));
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pr[1] == doctest::Approx(1.0));
}

TEST_CASE("adding a constant to every utility changes nothing") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u(1 + uniform_index(rng, 6));
    for (auto& v : u) v = uniform(rng, -50, 50);
    auto shifted = u;
    const double c = uniform(rng, -500, 500);
    for (auto& v : shifted) v += c;
    const auto a = logit_probabilities(u);
    const auto b = logit_probabilities(shifted);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }
}

TEST_CASE("shorter in-vehicle time raises a path's share") {
  const auto p = params(-0.147, -1.271, -0.573, -3.679);
  double last = 0;
  for (double ivt : {40.0, 30.0, 20.0, 10.0}) {
    const auto net = testing::parallel_paths({{ivt, 0.2, 0}, {25, 0.2, 0}});
    const double share = choice_probabilities(net, 0, 1, 1, p)[0];
    CHECK(share > last);
    last = share;
  }
}

TEST_CASE("sampling: single path always drawn") {
  const auto net = testing::parallel_paths({{10, 0, 0}});
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_path(net, 0, 1, 1, params(-1, -1, -1, -1), rng) == 1);
}

TEST_CASE("sampling: equal paths drawn evenly") {
  const auto net = testing::parallel_paths({{10, 0.5, 0}, {10, 0.5, 0}});
  Rng rng(42);
  int first = 0;
  for (int i = 0; i < 10000; ++i) first += sample_path(net, 0, 1, 1, params(-1, -1, -1, -1), rng) == 1;
  CHECK(std::abs(first / 10000.0 - 0.5) <= 0.015);
}

TEST_CASE("sampling is reproducible from the seed") {
  const auto net = testing::parallel_paths({{10, 0.5, 0}, {12, 0.2, 1}, {15, 0.1, 0}});
  const auto p = params(-0.147, -1.271, -0.573, -3.679);
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(sample_path(net, 0, 1, 1, p, a) == sample_path(net, 0, 1, 1, p, b));
}

TEST_CASE("inverse CDF never runs past the end") {
  const std::vector<double> p{0.25, 0.25, 0.5};
  CHECK(inverse_cdf(p, 0.0) == 0);
  CHECK(inverse_cdf(p, 0.25) == 1);
  CHECK(inverse_cdf(p, 0.9999999) == 2);
  CHECK(inverse_cdf(p, 1.0) == 2);
}

TEST_CASE("choice table matches direct probabilities") {
  const auto net = testing::parallel_paths({{10, 0.5, 0}, {12, 0.2, 1}, {15, 0.1, 0}});
  const auto p = params(-0.3, -1, -0.5, -2);
  const ChoiceTable table(net, p, 4);
  const auto direct = choice_probabilities(net, 0, 1, 2, p);
  const auto cached = table.probabilities(0, 2);
  REQUIRE(cached.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) CHECK(cached[i] == direct[i]);
}

}  // TEST_SUITE
