#include "hrt/geodesic.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "hrt/divergence.hpp"
#include "hrt/harness.hpp"
#include "hrt/rng.hpp"

using namespace hrt;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double mass_total(const BinnedDistribution& d) {
  double s = 0.0;
  for (const double m : d.masses()) s += m;
  return s;
}

}  // namespace

TEST_CASE("endpoints reproduce the inputs exactly") {
  SplitMix64 rng(21);
  const auto p1 = gen::random_distribution(6, rng);
  const auto p2 = gen::random_distribution(6, rng);
  const double theta = hellinger_angle(p1, p2);

  const GeodesicPoint at0 = geodesic_point(p1, p2, 0.0);
  CHECK(at0.distribution == p1);
  const GeodesicPoint at_theta = geodesic_point(p1, p2, theta);
  CHECK(at_theta.distribution == p2);
}

TEST_CASE("orthogonal pair: quarter turn is the even mixture") {
  const auto p1 = BinnedDistribution::points({0.5, 0.5, 0.0, 0.0});
  const auto p2 = BinnedDistribution::points({0.0, 0.0, 0.25, 0.75});
  const double theta = hellinger_angle(p1, p2);
  CHECK(theta == doctest::Approx(std::acos(0.0)).epsilon(1e-14));

  const GeodesicPoint q = geodesic_point(p1, p2, theta / 2.0);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(q.distribution.mass(i) ==
          doctest::Approx(0.5 * p1.mass(i) + 0.5 * p2.mass(i)).epsilon(1e-13));
  }
}

TEST_CASE("degenerate pair and out-of-range phi are rejected") {
  const auto p = BinnedDistribution::points({0.3, 0.7});
  CHECK_THROWS_AS(static_cast<void>(geodesic_point(p, p, 0.0)),
                  std::domain_error);
  CHECK_THROWS_AS(static_cast<void>(hellinger_midpoint(p, p)),
                  std::domain_error);

  const auto q = BinnedDistribution::points({0.7, 0.3});
  const double theta = hellinger_angle(p, q);
  CHECK_THROWS_AS(static_cast<void>(geodesic_point(p, q, theta + 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(geodesic_point(p, q, -0.1)),
                  std::invalid_argument);
}

TEST_CASE("midpoint of the symmetric Bernoulli pair is Bernoulli(0.5)") {
  const auto p1 = BinnedDistribution::points({0.75, 0.25});
  const auto p2 = BinnedDistribution::points({0.25, 0.75});
  const auto u = hellinger_midpoint(p1, p2);
  CHECK(u.mass(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(u.mass(1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("midpoint is Bhattacharyya-equidistant at cos(theta/2)") {
  SplitMix64 rng(22);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 2 + rng.next_below(11);
    const auto p1 = gen::random_distribution(k, rng, 0.15);
    const auto p2 = gen::random_distribution(k, rng, 0.15);
    if (hellinger_angle(p1, p2) < 1e-6) continue;
    const auto u = hellinger_midpoint(p1, p2);
    const double expected = std::cos(0.5 * hellinger_angle(p1, p2));
    CHECK(std::abs(bhattacharyya(p1, u) - expected) <= 1e-12);
    CHECK(std::abs(bhattacharyya(p2, u) - expected) <= 1e-12);
    CHECK(std::abs(hellinger_sq(p1, u) - hellinger_sq(p2, u)) <= 1e-12);
  }
}

TEST_CASE("orthogonal pair: B(p1, u) = 1/sqrt(2)") {
  const auto p1 = BinnedDistribution::points({1.0, 0.0});
  const auto p2 = BinnedDistribution::points({0.0, 1.0});
  const auto u = hellinger_midpoint(p1, p2);
  CHECK(bhattacharyya(p1, u) == doctest::Approx(kInvSqrt2).epsilon(1e-14));
}

TEST_CASE("geodesic points are valid distributions along the path") {
  SplitMix64 rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 2 + rng.next_below(11);
    const auto p1 = gen::random_distribution(k, rng, 0.1);
    const auto p2 = gen::random_distribution(k, rng, 0.1);
    const double theta = hellinger_angle(p1, p2);
    if (theta < 1e-6) continue;
    for (int j = 0; j < 20; ++j) {
      const double phi = theta * static_cast<double>(j) / 19.0;
      const GeodesicPoint q = geodesic_point(p1, p2, phi);
      const double total = mass_total(q.distribution);
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("H2 from p1 grows monotonically in phi") {
  SplitMix64 rng(24);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 2 + rng.next_below(11);
    const auto p1 = gen::random_distribution(k, rng);
    const auto p2 = gen::random_distribution(k, rng);
    const double theta = hellinger_angle(p1, p2);
    if (theta < 1e-6) continue;
    double prev = -1.0;
    for (int j = 0; j < 20; ++j) {
      const double phi = theta * static_cast<double>(j) / 19.0;
      const double h = hellinger_sq(p1, geodesic_point(p1, p2, phi).distribution);
      CHECK(h >= prev - 1e-12);
      prev = h;
    }
    // endpoint distance equals the pair distance
    CHECK(std::abs(prev - hellinger_sq(p1, p2)) <= 1e-12);
  }
}

TEST_CASE("critical radius closed forms") {
  const auto p1 = BinnedDistribution::points({1.0, 0.0});
  const auto p2 = BinnedDistribution::points({0.0, 1.0});
  CHECK(critical_radius(p1, p2).value ==
        doctest::Approx(1.0 - kInvSqrt2).epsilon(1e-14));

  // B = 0.5 (theta = pi/3): r* = 1 - cos(pi/6) = 1 - sqrt(3)/2
  const auto q1 = BinnedDistribution::points({1.0, 0.0});
  const auto q2 = BinnedDistribution::points({0.25, 0.75});
  CHECK(bhattacharyya(q1, q2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(critical_radius(q1, q2).value ==
        doctest::Approx(1.0 - std::sqrt(3.0) / 2.0).epsilon(1e-13));
}

TEST_CASE("critical radius is degenerate-flagged on identical pairs") {
  const auto p = BinnedDistribution::points({0.4, 0.6});
  const CriticalRadius r = critical_radius(p, p);
  CHECK(r.degenerate);
  CHECK(r.value == 0.0);
}

TEST_CASE("r* equals H2(p1, midpoint) on random pairs") {
  SplitMix64 rng(25);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 2 + rng.next_below(11);
    const auto p1 = gen::random_distribution(k, rng, 0.1);
    const auto p2 = gen::random_distribution(k, rng, 0.1);
    const CriticalRadius r = critical_radius(p1, p2);
    if (r.degenerate || hellinger_angle(p1, p2) < 1e-6) continue;
    const auto u = hellinger_midpoint(p1, p2);
    CHECK(std::abs(r.value - hellinger_sq(p1, u)) <= 1e-10);
  }
}
