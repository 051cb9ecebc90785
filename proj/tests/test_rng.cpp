#include "doctest.h"

#include <vector>

#include "qem/errors.hpp"
#include "qem/rng.hpp"

using namespace qem;

TEST_CASE("splitmix64 streams are deterministic and seed-sensitive") {
  SplitMix64 a(12345), b(12345), c(12346);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    CHECK(va == b.next());
    CHECK(va != c.next());
  }
}

TEST_CASE("next_double stays in [0,1) and looks uniform") {
  SplitMix64 rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("derive_seed separates base and index roles") {
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 5) == derive_seed(42, 5));
  // distinct slots within one run draw distinct streams
  CHECK(seed_slot::zne(1) != seed_slot::raw);
  CHECK(seed_slot::zne(3) != seed_slot::block(3));
}

TEST_CASE("multinomial sampling") {
  const std::vector<double> probs = {0.5, 0.25, 0.25};

  SUBCASE("counts sum to shots and repeat under the same seed") {
    const auto a = multinomial_sample(probs, 10000, 99);
    const auto b = multinomial_sample(probs, 10000, 99);
    CHECK(a == b);
    long long total = 0;
    for (long long c : a) total += c;
    CHECK(total == 10000);
    CHECK(a[0] == doctest::Approx(5000).epsilon(0.05));
  }

  SUBCASE("zero-probability bins are never drawn") {
    const auto counts = multinomial_sample({0.0, 1.0, 0.0}, 5000, 3);
    CHECK(counts[0] == 0);
    CHECK(counts[1] == 5000);
    CHECK(counts[2] == 0);
  }

  SUBCASE("small negative drift is clamped, large drift throws") {
    CHECK_NOTHROW(multinomial_sample({1.0 - 1e-12, -1e-12, 1e-12}, 10, 1));
    CHECK_THROWS_AS(multinomial_sample({0.5, -0.1, 0.6}, 10, 1), NumericalError);
    CHECK_THROWS_AS(multinomial_sample({0.5, 0.4}, 10, 1), NumericalError);
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(multinomial_sample({}, 10, 1), ValidationError);
    CHECK_THROWS_AS(multinomial_sample(probs, 0, 1), ValidationError);
  }
}
