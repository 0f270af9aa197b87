#include "doctest.h"
#include "railcal/capacity.hpp"
#include "railcal/rng.hpp"

using namespace railcal;

TEST_SUITE("capacity") {

TEST_CASE("uncongested stop: base capacity only") {
  CHECK(effective_capacity(8, 0, 0, false, {232, 0.0732, 0.0607}) == 1856);
  CHECK(effective_capacity(8, 1500, 900, false, {232, 0.0732, 0.0607}) == 1856);
}

TEST_CASE("congested stop: reference parameters") {
  // 1856 + 73.2 + 30.35
  CHECK(effective_capacity(8, 1000, 500, true, {232, 0.0732, 0.0607}) == 1959);
  // 1856 + 131.76 + 2.428
  CHECK(effective_capacity(8, 1800, 40, true, {232, 0.0732, 0.0607}) == 1990);
}

TEST_CASE("crowding-insensitive parameters make congestion irrelevant") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 10));
    const auto h = static_cast<std::int64_t>(uniform_index(rng, 3000));
    const auto q = static_cast<std::int64_t>(uniform_index(rng, 3000));
    const CapacityParams p{uniform(rng, 220, 260), 0, 0};
    CHECK(effective_capacity(n, h, q, true, p) == effective_capacity(n, h, q, false, p));
  }
}

TEST_CASE("monotone in load and queue at congested stops") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const CapacityParams p{uniform(rng, 220, 260), uniform(rng, 0, 0.2), uniform(rng, 0, 0.2)};
    const int n = 1 + static_cast<int>(uniform_index(rng, 10));
    const auto h = static_cast<std::int64_t>(uniform_index(rng, 3000));
    const auto q = static_cast<std::int64_t>(uniform_index(rng, 3000));
    const auto c = effective_capacity(n, h, q, true, p);
    CHECK(effective_capacity(n, h + 1 + static_cast<std::int64_t>(uniform_index(rng, 50)), q, true, p) >= c);
    CHECK(effective_capacity(n, h, q + 1 + static_cast<std::int64_t>(uniform_index(rng, 50)), true, p) >= c);
    CHECK(effective_capacity(n, h + 100, q + 100, false, p) == effective_capacity(n, h, q, false, p));
  }
}

TEST_CASE("boarding allowance is never negative") {
  CHECK(boarding_allowance(1856, 2000) == 0);
  CHECK(boarding_allowance(1856, 1800) == 56);
  CHECK(boarding_allowance(0, 0) == 0);
}

}  // TEST_SUITE
