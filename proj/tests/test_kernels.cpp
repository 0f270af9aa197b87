#include <cmath>
#include <vector>

#include "doctest.h"
#include "railcal/kernels.hpp"
#include "railcal/rng.hpp"

using namespace railcal;
namespace k = railcal::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -3, double hi = 3) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table matches naive loops") {
  const auto& s = k::scalar_table();
  Rng rng(1);
  for (std::size_t n = 0; n < 20; ++n) {
    const auto a = random_vec(n, rng), b = random_vec(n, rng);
    double ref = 0;
    for (std::size_t i = 0; i < n; ++i) ref += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(close(s.sum_sq_diff(a.data(), b.data(), n), ref));
    const auto d2 = random_vec(n, rng, 0, 4);
    double cub = 0;
    for (std::size_t i = 0; i < n; ++i) cub += a[i] * std::pow(std::sqrt(d2[i]), 3);
    CHECK(close(s.cubic_sum(d2.data(), a.data(), n), cub));
  }
}

TEST_CASE("AVX2 variant agrees with the scalar reference") {
  const auto* v = k::avx2_table();
  if (v == nullptr) {
    MESSAGE("AVX2 variant unavailable on this machine; skipped");
    return;
  }
  const auto& s = k::scalar_table();
  Rng rng(2);
  for (std::size_t n = 0; n <= 37; ++n) {
    INFO("n = " << n);
    const auto a = random_vec(n, rng), b = random_vec(n, rng);
    CHECK(close(v->sum_sq_diff(a.data(), b.data(), n), s.sum_sq_diff(a.data(), b.data(), n)));
    const auto d2 = random_vec(n, rng, 0, 4);
    CHECK(close(v->cubic_sum(d2.data(), a.data(), n), s.cubic_sum(d2.data(), a.data(), n)));
    for (std::size_t dim : {1u, 3u, 7u}) {
      const std::size_t stride = n + 5;
      const auto cols = random_vec(stride * dim, rng);
      const auto x = random_vec(dim, rng);
      const auto w = random_vec(dim, rng, 0.1, 2);
      std::vector<double> o1(n + 1, -1), o2(n + 1, -1);
      s.weighted_sq_dist(cols.data(), n, stride, dim, x.data(), w.data(), o1.data());
      v->weighted_sq_dist(cols.data(), n, stride, dim, x.data(), w.data(), o2.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i]));
      CHECK(o2[n] == -1);  // nothing written past n
    }
  }
}

TEST_CASE("selection falls back and round-trips") {
  const auto before = k::active_isa();
  CHECK(k::select(k::Isa::Scalar) == k::Isa::Scalar);
  CHECK(k::active_isa() == k::Isa::Scalar);
  const auto got = k::select(k::Isa::Avx2);
  CHECK((got == k::Isa::Avx2) == (k::avx2_table() != nullptr));
  k::select(before);
  CHECK(k::isa_name(k::Isa::Scalar) == "scalar");
}

TEST_CASE("point set distances under both variants") {
  Rng rng(5);
  k::PointSet ps(4);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 23; ++i) {  // crosses growth boundaries
    pts.push_back(random_vec(4, rng));
    ps.add(pts.back());
  }
  REQUIRE(ps.size() == 23);
  CHECK(ps.point(7) == pts[7]);
  const auto x = random_vec(4, rng);
  const auto before = k::active_isa();
  for (auto isa : {k::Isa::Scalar, k::Isa::Avx2}) {
    k::select(isa);
    std::vector<double> out(23);
    ps.sq_dist(x, out);
    for (int i = 0; i < 23; ++i) {
      double ref = 0;
      for (int d = 0; d < 4; ++d) ref += (pts[i][d] - x[d]) * (pts[i][d] - x[d]);
      CHECK(close(out[i], ref));
    }
  }
  k::select(before);
}

}  // TEST_SUITE
