#pragma once

#include "hrt/distribution.hpp"

namespace hrt {

/// All pairwise distances used by the test machinery, computed on a shared
/// support. Atoms where both masses vanish contribute 0 to every divergence.
struct DivergenceReport {
  double hellinger_sq = 0.0;   // in [0, 1]
  double bhattacharyya = 1.0;  // in [0, 1], equals 1 - hellinger_sq
  double tv = 0.0;             // in [0, 1]
  double sym_chi_sq = 0.0;     // >= 0
};

// Squared Hellinger distance: 0.5 * sum (sqrt(m1) - sqrt(m2))^2.
double hellinger_sq(const BinnedDistribution& d1, const BinnedDistribution& d2);

// Bhattacharyya coefficient: sum sqrt(m1 * m2).
double bhattacharyya(const BinnedDistribution& d1, const BinnedDistribution& d2);

// Total variation: 0.5 * sum |m1 - m2|.
double tv(const BinnedDistribution& d1, const BinnedDistribution& d2);

// Symmetric chi-squared: sum (m1 - m2)^2 / (m1 + m2), 0/0 terms are 0.
double sym_chi_sq(const BinnedDistribution& d1, const BinnedDistribution& d2);

DivergenceReport divergence_report(const BinnedDistribution& d1,
                                   const BinnedDistribution& d2);

/// Throws std::invalid_argument unless d1 and d2 share a support partition.
void require_aligned(const BinnedDistribution& d1, const BinnedDistribution& d2,
                     const char* op);

}  // namespace hrt
