#pragma once

#include "hrt/distribution.hpp"

namespace hrt {

/// A point q_phi on the Hellinger geodesic between p1 and p2:
///   sqrt(q_phi) = (sin(theta - phi) * sqrt(p1) + sin(phi) * sqrt(p2)) / sin(theta)
/// where cos(theta) is the Bhattacharyya coefficient of the pair. phi = 0
/// reproduces p1 exactly and phi = theta reproduces p2 exactly.
struct GeodesicPoint {
  double phi = 0.0;
  double theta = 0.0;
  BinnedDistribution distribution;
};

struct CriticalRadius {
  double value = 0.0;
  bool degenerate = false;  // p1 == p2 (theta == 0)
};

/// theta = arccos(B(p1, p2)), with B clamped into [0, 1] to absorb
/// 1e-15-scale rounding before arccos.
double hellinger_angle(const BinnedDistribution& p1, const BinnedDistribution& p2);

/// Throws std::domain_error when p1 == p2 (theta == 0, geodesic degenerate)
/// and std::invalid_argument when phi lies outside [0, theta].
GeodesicPoint geodesic_point(const BinnedDistribution& p1,
                             const BinnedDistribution& p2, double phi);

/// Geodesic point at phi = theta/2; equidistant from both endpoints with
/// B(p1, u) = B(p2, u) = cos(theta/2). Throws std::domain_error when p1 == p2.
BinnedDistribution hellinger_midpoint(const BinnedDistribution& p1,
                                      const BinnedDistribution& p2);

/// r* = 1 - cos(theta/2), the Hellinger-ball radius at which balls around p1
/// and p2 meet at the midpoint; equals H^2(p1, hellinger_midpoint(p1, p2)).
/// For p1 == p2 returns 0 with the degeneracy flag set instead of throwing.
CriticalRadius critical_radius(const BinnedDistribution& p1,
                               const BinnedDistribution& p2);

}  // namespace hrt
