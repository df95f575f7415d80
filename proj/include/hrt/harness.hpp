#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hrt/distribution.hpp"
#include "hrt/hypothesis_tests.hpp"
#include "hrt/rng.hpp"

#include "json.hpp"

namespace hrt {

enum class Truth { H0, H1, Neither };

/// Ground-truth side of the gamma-separated problem:
///   H0 when gamma * H^2(p, p1) <= H^2(p, p2),
///   H1 when H^2(p, p1) >= gamma * H^2(p, p2),
///   Neither otherwise (any decision is acceptable there).
Truth classify_truth(double h2_to_p1, double h2_to_p2, double gamma);
Truth classify_truth(const BinnedDistribution& p, const BinnedDistribution& p1,
                     const BinnedDistribution& p2, double gamma);

// Baraud's guarantee threshold (sqrt(2)+1)/(sqrt(2)-1); the default slack
// factor wherever one is needed.
inline constexpr double kBaraudGamma = 5.82842712474619;
// The lower-bound family ratio sqrt(2)/(sqrt(2)-1) = 2 + sqrt(2).
inline constexpr double kLowerBoundGamma = 3.4142135623730949;

struct ExperimentConfig {
  TestFamily family = TestFamily::Baraud;
  BinnedDistribution p1, p2;
  BinnedDistribution p;            // the sampling distribution (the truth)
  std::int64_t sample_count = 1;   // m
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  double delta = 1.0 / 3.0;        // target error, in (0, 0.5)
  double gamma = kBaraudGamma;     // separation factor, > 1
  int threads = 0;                 // 0: HRT_THREADS env, then hardware
};

struct ErrorEstimate {
  double type1 = 0.0;  // P(declare H1 | truth H0); 0 when truth is H1
  double type2 = 0.0;  // P(declare H0 | truth H1); 0 when truth is H0
  double max_error = 0.0;
  double ci_halfwidth = 0.0;  // Wilson 95% on the observed side
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  Truth truth = Truth::Neither;
};

/// Empirical error rate of the configured test over seeded trials. The truth
/// side is fixed by classify_truth(p, p1, p2, gamma); a "Neither" ground
/// truth leaves no scorable trials and throws std::domain_error. Identical
/// configs give bit-identical estimates regardless of thread count.
ErrorEstimate estimate_error(const ExperimentConfig& config);

/// One estimate per m in ascending m_grid, all derived from the shared base
/// seed (cell i uses seeds derived from seed and i).
std::vector<std::pair<std::int64_t, ErrorEstimate>> sample_complexity_sweep(
    const ExperimentConfig& config, std::span<const std::int64_t> m_grid);

/// One reproduction preset per acceptance check; run them all with
/// reproduce_paper on each name from preset_names().
struct PresetReport {
  std::string name;
  bool pass = false;
  nlohmann::ordered_json details;
};

std::vector<std::string> preset_names();
PresetReport reproduce_paper(std::string_view preset_name, std::uint64_t seed);
PresetReport reproduce_paper(std::string_view preset_name);  // built-in seed

namespace gen {

/// Random distribution on `atoms` point atoms: normalized exponentials, with
/// an optional per-atom zero-out probability (masses renormalized after).
BinnedDistribution random_distribution(std::size_t atoms, SplitMix64& rng,
                                       double zero_prob = 0.0);

/// A random point q on the Hellinger geodesic from `center` toward a random
/// direction, with H^2(q, center) = 1 - cos(phi) <= h2_cap by construction.
BinnedDistribution random_point_near(const BinnedDistribution& center,
                                     double h2_cap, SplitMix64& rng);

}  // namespace gen

}  // namespace hrt
