#include "hrt/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hrt/divergence.hpp"
#include "hrt/kernels.hpp"

namespace hrt {
namespace {

double clamped_cos_angle(const BinnedDistribution& p1,
                         const BinnedDistribution& p2) {
  return std::clamp(bhattacharyya(p1, p2), 0.0, 1.0);
}

}  // namespace

double hellinger_angle(const BinnedDistribution& p1,
                       const BinnedDistribution& p2) {
  return std::acos(clamped_cos_angle(p1, p2));
}

GeodesicPoint geodesic_point(const BinnedDistribution& p1,
                             const BinnedDistribution& p2, double phi) {
  require_aligned(p1, p2, "geodesic_point");
  p1.ensure_valid();
  p2.ensure_valid();

  const double theta = hellinger_angle(p1, p2);
  if (theta == 0.0) {
    throw std::domain_error(
        "geodesic_point: p1 = p2 (theta = 0), geodesic degenerate");
  }
  if (!(phi >= 0.0 && phi <= theta)) {
    throw std::invalid_argument("geodesic_point: phi out of [0, theta]");
  }

  // Endpoints are returned verbatim: the sqrt/square round trip of the
  // general formula would perturb masses by an ulp.
  if (phi == 0.0) return {phi, theta, p1};
  if (phi == theta) return {phi, theta, p2};

  const double inv_sin = 1.0 / std::sin(theta);
  const double c1 = std::sin(theta - phi) * inv_sin;
  const double c2 = std::sin(phi) * inv_sin;
  std::vector<double> masses(p1.size());
  kernels::active().geodesic_combine(p1.masses().data(), p2.masses().data(),
                                     c1, c2, masses.data(), masses.size());
  const std::string label = "geodesic(" + p1.label() + "," + p2.label() + ")";
  BinnedDistribution q =
      p1.kind() == SupportKind::Bins
          ? BinnedDistribution::bins(p1.lo(), p1.hi(), std::move(masses), label)
          : BinnedDistribution::points(std::move(masses), label);
  return {phi, theta, std::move(q)};
}

BinnedDistribution hellinger_midpoint(const BinnedDistribution& p1,
                                      const BinnedDistribution& p2) {
  const double theta = hellinger_angle(p1, p2);
  if (theta == 0.0) {
    throw std::domain_error("hellinger_midpoint: p1 = p2 (theta = 0)");
  }
  return geodesic_point(p1, p2, 0.5 * theta).distribution;
}

CriticalRadius critical_radius(const BinnedDistribution& p1,
                               const BinnedDistribution& p2) {
  const double cos_theta = clamped_cos_angle(p1, p2);
  if (cos_theta == 1.0) return {0.0, true};
  // cos(theta/2) by the half-angle identity, skipping the acos/cos round trip.
  return {1.0 - std::sqrt(0.5 * (1.0 + cos_theta)), false};
}

}  // namespace hrt
