#include "hrt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hrt/divergence.hpp"
#include "hrt/geodesic.hpp"
#include "parallel.hpp"

namespace hrt {

Truth classify_truth(double h2_to_p1, double h2_to_p2, double gamma) {
  if (!(gamma > 1.0)) {
    throw std::invalid_argument("classify_truth: need gamma > 1");
  }
  if (gamma * h2_to_p1 <= h2_to_p2) return Truth::H0;
  if (h2_to_p1 >= gamma * h2_to_p2) return Truth::H1;
  return Truth::Neither;
}

Truth classify_truth(const BinnedDistribution& p, const BinnedDistribution& p1,
                     const BinnedDistribution& p2, double gamma) {
  return classify_truth(hellinger_sq(p, p1), hellinger_sq(p, p2), gamma);
}

ErrorEstimate estimate_error(const ExperimentConfig& config) {
  if (config.trials < 1) {
    throw std::invalid_argument("estimate_error: need trials >= 1");
  }
  if (config.sample_count < 1) {
    throw std::invalid_argument("estimate_error: need sample_count >= 1");
  }
  if (!(config.delta > 0.0 && config.delta < 0.5)) {
    throw std::invalid_argument("estimate_error: need delta in (0, 0.5)");
  }
  config.p.ensure_valid();

  const Truth truth = classify_truth(config.p, config.p1, config.p2, config.gamma);
  if (truth == Truth::Neither) {
    throw std::domain_error(
        "estimate_error: ground truth is 'neither' (p is not gamma-separated), "
        "every trial would be excluded");
  }

  const RobustTest test =
      RobustTest::prepare({config.family, config.p1, config.p2});

  // Per-trial seeds are derived from (seed, trial index), so the partition
  // into chunks cannot change the outcome.
  const int nthreads = detail::resolve_threads(config.threads);
  std::vector<std::int64_t> errors(static_cast<std::size_t>(std::max<std::int64_t>(
      1, std::min<std::int64_t>(nthreads, config.trials))));
  detail::parallel_chunks(
      config.trials, nthreads,
      [&](int chunk, std::int64_t begin, std::int64_t end) {
        std::int64_t local = 0;
        for (std::int64_t trial = begin; trial < end; ++trial) {
          const SampleBatch batch =
              sample(config.p, static_cast<std::size_t>(config.sample_count),
                     derive_seed(config.seed, static_cast<std::uint64_t>(trial)));
          const Verdict v = test.decide(batch).verdict;
          const bool error =
              (truth == Truth::H0 && v == Verdict::H1) ||
              (truth == Truth::H1 && v == Verdict::H0);
          if (error) ++local;
        }
        errors[static_cast<std::size_t>(chunk)] = local;
      });

  std::int64_t total_errors = 0;
  for (const std::int64_t e : errors) total_errors += e;
  const double rate =
      static_cast<double>(total_errors) / static_cast<double>(config.trials);

  ErrorEstimate est;
  est.truth = truth;
  est.trials = config.trials;
  est.seed = config.seed;
  est.type1 = truth == Truth::H0 ? rate : 0.0;
  est.type2 = truth == Truth::H1 ? rate : 0.0;
  est.max_error = rate;
  est.ci_halfwidth = detail::wilson_halfwidth(rate, config.trials);
  return est;
}

std::vector<std::pair<std::int64_t, ErrorEstimate>> sample_complexity_sweep(
    const ExperimentConfig& config, std::span<const std::int64_t> m_grid) {
  if (m_grid.empty()) {
    throw std::invalid_argument("sample_complexity_sweep: empty m grid");
  }
  if (!std::is_sorted(m_grid.begin(), m_grid.end())) {
    throw std::invalid_argument("sample_complexity_sweep: m grid must ascend");
  }
  std::vector<std::pair<std::int64_t, ErrorEstimate>> out;
  out.reserve(m_grid.size());
  for (std::size_t cell = 0; cell < m_grid.size(); ++cell) {
    ExperimentConfig c = config;
    c.sample_count = m_grid[cell];
    c.seed = derive_seed(config.seed, 0x5eed0000ULL + cell);
    out.emplace_back(m_grid[cell], estimate_error(c));
  }
  return out;
}

namespace gen {

BinnedDistribution random_distribution(std::size_t atoms, SplitMix64& rng,
                                       double zero_prob) {
  if (atoms == 0) {
    throw std::invalid_argument("random_distribution: need atoms >= 1");
  }
  std::vector<double> masses(atoms);
  for (;;) {
    double total = 0.0;
    for (double& m : masses) {
      const bool zero = zero_prob > 0.0 && rng.next_double() < zero_prob;
      m = zero ? 0.0 : -std::log(1.0 - rng.next_double());
      total += m;
    }
    if (total <= 0.0) continue;  // all atoms zeroed out, redraw
    for (double& m : masses) m /= total;
    return BinnedDistribution::points(std::move(masses), "random");
  }
}

BinnedDistribution random_point_near(const BinnedDistribution& center,
                                     double h2_cap, SplitMix64& rng) {
  if (!(h2_cap > 0.0 && h2_cap < 1.0)) {
    throw std::invalid_argument("random_point_near: need h2_cap in (0, 1)");
  }
  for (;;) {
    BinnedDistribution direction = gen::random_distribution(center.size(), rng);
    const double theta = hellinger_angle(center, direction);
    if (theta <= 1e-8) continue;  // redraw, the geodesic is degenerate
    // H^2(q_phi, center) = 1 - cos(phi); stay away from both endpoints.
    const double phi_cap = std::min(std::acos(1.0 - h2_cap), theta);
    const double phi = phi_cap * (0.01 + 0.98 * rng.next_double());
    return geodesic_point(center, direction, phi).distribution;
  }
}

}  // namespace gen

}  // namespace hrt
