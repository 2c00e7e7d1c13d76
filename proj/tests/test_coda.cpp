#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "agecoda/coda.hpp"
#include "support/generators.hpp"

using namespace agecoda;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testsupport::random_composition;
using testsupport::random_parts;

TEST_CASE("closure rescales to the constant", "[coda]") {
  const Composition quarter = closure(std::vector<double>{1, 1, 1, 1}, 100.0);
  for (std::size_t d = 0; d < 4; ++d) REQUIRE_THAT(quarter[d], WithinAbs(25.0, 1e-12));

  const Composition half = closure(std::vector<double>{2, 2}, 1.0);
  REQUIRE_THAT(half[0], WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(half[1], WithinAbs(0.5, 1e-15));

  const Composition three_one = closure(std::vector<double>{3, 1}, 100.0);
  REQUIRE_THAT(three_one[0], WithinAbs(75.0, 1e-12));
  REQUIRE_THAT(three_one[1], WithinAbs(25.0, 1e-12));
  REQUIRE(three_one.k() == 100.0);
}

TEST_CASE("closure rejects invalid input", "[coda]") {
  REQUIRE_THROWS_AS(closure(std::vector<double>{1.0, 0.0}, 1.0), NonPositivePart);
  REQUIRE_THROWS_AS(closure(std::vector<double>{1.0, -2.0}, 1.0), NonPositivePart);
  REQUIRE_THROWS_AS(closure(std::vector<double>{5.0}, 1.0), EmptyVector);
  REQUIRE_THROWS_AS(closure(std::vector<double>{}, 1.0), EmptyVector);
  REQUIRE_THROWS_AS(closure(std::vector<double>{1.0, 2.0}, 0.0), ConfigError);
}

TEST_CASE("composition invariants are enforced at construction", "[coda]") {
  REQUIRE_THROWS_AS(Composition({0.5, 0.6}, 1.0), Error);        // sum != k
  REQUIRE_THROWS_AS(Composition({1.0, -1.0}, 0.0), ConfigError); // k <= 0
  REQUIRE_NOTHROW(Composition({0.5, 0.5}, 1.0));
}

TEST_CASE("zero_replace substitutes delta and preserves the sum", "[coda]") {
  const auto replaced = zero_replace(std::vector<double>{1.0, 0.0, 1.0}, 0.01);
  REQUIRE_THAT(replaced[0], WithinAbs(0.995, 1e-12));
  REQUIRE_THAT(replaced[1], WithinAbs(0.01, 1e-15));
  REQUIRE_THAT(replaced[2], WithinAbs(0.995, 1e-12));

  // no zeros: exact identity
  const auto untouched = zero_replace(std::vector<double>{5.0, 5.0}, 0.01);
  REQUIRE(untouched == std::vector<double>{5.0, 5.0});

  REQUIRE_THROWS_AS(zero_replace(std::vector<double>{0.0, 0.0}, 0.01), AllZero);
  REQUIRE_THROWS_AS(zero_replace(std::vector<double>{1.0, -0.5}, 0.01), NonPositivePart);
  // a delta so large the shrink factor would go nonpositive
  REQUIRE_THROWS_AS(zero_replace(std::vector<double>{1.0, 0.0}, 2.0), NonPositivePart);
  REQUIRE_THROWS_AS(zero_replace(std::vector<double>{1.0, 0.0}, 0.0), ConfigError);
}

TEST_CASE("zero_replace sum preservation and positivity hold on random input", "[coda]") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::bernoulli_distribution zero(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(8);
    double sum = 0.0;
    bool any_positive = false;
    for (double& x : v) {
      x = zero(rng) ? 0.0 : value(rng);
      if (x > 0.0) any_positive = true;
      sum += x;
    }
    if (!any_positive) continue;
    const auto replaced = zero_replace(v, 1e-4);
    double replaced_sum = 0.0;
    for (double x : replaced) {
      REQUIRE(x > 0.0);
      replaced_sum += x;
    }
    REQUIRE_THAT(replaced_sum, WithinRel(sum, 1e-9));
  }
}

TEST_CASE("geometric mean", "[coda]") {
  REQUIRE_THAT(geometric_mean(closure(std::vector<double>{1, 1, 1, 1}, 100.0)),
               WithinAbs(25.0, 1e-12));
  REQUIRE_THAT(geometric_mean(Composition({0.8, 0.2}, 1.0)), WithinAbs(0.4, 1e-12));
  REQUIRE_THAT(geometric_mean(Composition({75.0, 25.0}, 100.0)),
               WithinAbs(std::sqrt(1875.0), 1e-10));
}

TEST_CASE("clr of the uniform composition is zero", "[coda]") {
  const ClrVector z = clr(closure(std::vector<double>{1, 1, 1, 1}, 100.0));
  for (std::size_t d = 0; d < 4; ++d) REQUIRE_THAT(z[d], WithinAbs(0.0, 1e-12));
}

TEST_CASE("clr hand example and scale invariance", "[coda]") {
  const ClrVector z = clr(Composition({0.8, 0.2}, 1.0));
  REQUIRE_THAT(z[0], WithinAbs(std::log(2.0), 1e-12));
  REQUIRE_THAT(z[1], WithinAbs(-std::log(2.0), 1e-12));

  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = random_parts(rng, 6);
    std::vector<double> scaled(raw);
    for (double& x : scaled) x *= 137.0;
    const ClrVector a = clr(closure(raw, 1.0));
    const ClrVector b = clr(closure(scaled, 1.0));
    for (std::size_t d = 0; d < 6; ++d) REQUIRE_THAT(a[d], WithinAbs(b[d], 1e-12));
  }
}

TEST_CASE("clr coordinates sum to zero within tolerance", "[coda]") {
  std::mt19937 rng(11);
  for (std::size_t dim : {2u, 5u, 21u}) {
    for (int trial = 0; trial < 100; ++trial) {
      const ClrVector z = clr(random_composition(rng, dim));
      double sum = 0.0;
      for (std::size_t d = 0; d < dim; ++d) sum += z[d];
      REQUIRE(std::abs(sum) <= 1e-9 * static_cast<double>(dim));
    }
  }
}

TEST_CASE("clr vector construction rejects uncentered coordinates", "[coda]") {
  REQUIRE_THROWS_AS(ClrVector({1.0, 0.5}), NotCentered);
  REQUIRE_NOTHROW(ClrVector({1.0, -1.0}));
  REQUIRE_THROWS_AS(ClrVector({0.0}), EmptyVector);
}

TEST_CASE("clr_inverse examples and round trips", "[coda]") {
  const Composition uniform = clr_inverse(ClrVector({0.0, 0.0, 0.0}), 1.0);
  for (std::size_t d = 0; d < 3; ++d) REQUIRE_THAT(uniform[d], WithinAbs(1.0 / 3.0, 1e-12));

  const Composition back = clr_inverse(ClrVector({std::log(2.0), -std::log(2.0)}), 1.0);
  REQUIRE_THAT(back[0], WithinAbs(0.8, 1e-12));
  REQUIRE_THAT(back[1], WithinAbs(0.2, 1e-12));

  std::mt19937 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Composition x = random_composition(rng, 2 + trial % 20, 100.0);
    const Composition round = clr_inverse(clr(x), x.k());
    for (std::size_t d = 0; d < x.dimension(); ++d) {
      REQUIRE_THAT(round[d], WithinRel(x[d], 1e-9));
    }
    const ClrVector z = clr(x);
    const ClrVector z2 = clr(clr_inverse(z, 1.0));
    for (std::size_t d = 0; d < x.dimension(); ++d) {
      REQUIRE_THAT(z2[d], WithinAbs(z[d], 1e-9));
    }
  }
}

TEST_CASE("aitchison distance hand values", "[coda]") {
  const Composition x({0.8, 0.2}, 1.0);
  const Composition y({0.5, 0.5}, 1.0);
  REQUIRE_THAT(aitchison_distance(x, y), WithinAbs(std::sqrt(2.0) * std::log(2.0), 1e-12));
  REQUIRE(aitchison_distance(x, x) == 0.0);

  const Composition z({0.1, 0.2, 0.7}, 1.0);
  REQUIRE_THROWS_AS(aitchison_distance(x, z), DimensionMismatch);
}

TEST_CASE("metric axioms on random triples", "[coda]") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t dim = 2 + trial % 20;
    const Composition x = random_composition(rng, dim);
    const Composition y = random_composition(rng, dim);
    const Composition z = random_composition(rng, dim);
    const double dxy = aitchison_distance(x, y);
    const double dyx = aitchison_distance(y, x);
    const double dxz = aitchison_distance(x, z);
    const double dyz = aitchison_distance(y, z);
    REQUIRE(dxy == dyx);
    REQUIRE(dxy >= 0.0);
    REQUIRE(aitchison_distance(x, x) == 0.0);
    REQUIRE(dxz <= dxy + dyz + 1e-9);
  }
}

TEST_CASE("distance forms agree", "[coda]") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t dim = 2 + trial % 20;
    const Composition x = random_composition(rng, dim);
    const Composition y = random_composition(rng, dim);
    REQUIRE_THAT(aitchison_distance_logratio(x, y),
                 WithinAbs(aitchison_distance(x, y), 1e-10));
  }
}

TEST_CASE("distance is invariant to the closure constant", "[coda]") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + trial % 20;
    const auto raw_x = random_parts(rng, dim);
    const auto raw_y = random_parts(rng, dim);
    const double d1 = aitchison_distance(closure(raw_x, 1.0), closure(raw_y, 1.0));
    const double d100 = aitchison_distance(closure(raw_x, 100.0), closure(raw_y, 100.0));
    REQUIRE_THAT(d100, WithinAbs(d1, 1e-10));
    // mixed constants are fine as well
    const double mixed = aitchison_distance(closure(raw_x, 1.0), closure(raw_y, 100.0));
    REQUIRE_THAT(mixed, WithinAbs(d1, 1e-10));
  }
}

TEST_CASE("perturbation invariance of the distance", "[coda]") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + trial % 20;
    const Composition x = random_composition(rng, dim);
    const Composition y = random_composition(rng, dim);
    const Composition p = random_composition(rng, dim);
    const double base = aitchison_distance(x, y);
    const double perturbed = aitchison_distance(perturbation(p, x), perturbation(p, y));
    REQUIRE_THAT(perturbed, WithinAbs(base, 1e-9));
  }
}

TEST_CASE("perturbation neutral element and hand example", "[coda]") {
  const Composition x({0.8, 0.2}, 1.0);
  const Composition uniform({0.5, 0.5}, 1.0);
  const Composition same = perturbation(uniform, x);
  REQUIRE_THAT(same[0], WithinAbs(0.8, 1e-12));
  REQUIRE_THAT(same[1], WithinAbs(0.2, 1e-12));
  REQUIRE(same.k() == x.k());

  REQUIRE_THROWS_AS(perturbation(uniform, Composition({0.2, 0.3, 0.5}, 1.0)),
                    DimensionMismatch);
}

TEST_CASE("euclidean distance on shares", "[coda]") {
  const Composition a({75.0, 25.0}, 100.0);
  const Composition b({25.0, 75.0}, 100.0);
  REQUIRE(euclidean_distance(a, a) == 0.0);
  REQUIRE_THAT(euclidean_distance(a, b), WithinAbs(std::sqrt(5000.0), 1e-10));
  // the same shares at k=1 give the same value: both sides re-close to 100
  REQUIRE_THAT(euclidean_distance(Composition({0.75, 0.25}, 1.0), b),
               WithinAbs(std::sqrt(5000.0), 1e-10));
}

TEST_CASE("euclidean distance is not perturbation invariant, aitchison is", "[coda]") {
  std::mt19937 rng(31);
  int moved = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Composition x = random_composition(rng, 5);
    const Composition y = random_composition(rng, 5);
    const Composition p = random_composition(rng, 5);
    const double ait_base = aitchison_distance(x, y);
    const double ait_pert = aitchison_distance(perturbation(p, x), perturbation(p, y));
    REQUIRE_THAT(ait_pert, WithinAbs(ait_base, 1e-9));
    const double euc_base = euclidean_distance(x, y);
    const double euc_pert = euclidean_distance(perturbation(p, x), perturbation(p, y));
    if (std::abs(euc_pert - euc_base) > 1e-6) ++moved;
  }
  REQUIRE(moved > 0);  // perturbation visibly changes the euclidean distance
}
