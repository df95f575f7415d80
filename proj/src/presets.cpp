// Reproduction presets: each one re-measures one headline number of the
// study at desk scale and reports pass/fail against its pinned tolerance.

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "hrt/adversarial.hpp"
#include "hrt/divergence.hpp"
#include "hrt/geodesic.hpp"
#include "hrt/harness.hpp"
#include "parallel.hpp"

namespace hrt {
namespace {

using nlohmann::ordered_json;

constexpr double kSqrt2 = 1.4142135623730951;

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

// Re-expresses three interval-bin distributions on one shared grid.
std::array<BinnedDistribution, 3> align_three(const BinnedDistribution& a,
                                             const BinnedDistribution& b,
                                             const BinnedDistribution& c) {
  auto [a1, b1] = align_supports(a, b);
  auto [a2, c2] = align_supports(a1, c);
  auto [b2, c3] = align_supports(b1, c2);
  if (!a2.same_support(b2) || !b2.same_support(c3)) {
    throw std::logic_error("align_three: refinement did not converge");
  }
  return {std::move(a2), std::move(b2), std::move(c3)};
}

// ---------------------------------------------------------------------------

PresetReport hellinger_ratio(std::uint64_t seed) {
  Stopwatch sw;
  const FamilyParams params{1.0, 1e6, 1.0, 1000};
  const DistanceProfile prof =
      family_distance_profile(params, FamilySide::PerturbP1);

  const double expected_h2_p1 = 0.25 * ((kSqrt2 - 1.0) * (kSqrt2 - 1.0) + 1.0);
  const double target_ratio = kSqrt2 / (kSqrt2 - 1.0);
  const double ratio = prof.h2_to_p2 / prof.h2_to_p1;

  const double h2_err = std::abs(prof.h2_to_p1 - expected_h2_p1);
  const double ratio_err = std::abs(ratio - target_ratio);
  const double runtime = sw.ms();
  const bool pass = h2_err <= 1e-12 && ratio_err <= 3e-3 && runtime < 1000.0;

  ordered_json d;
  d["params"] = {{"b", params.b}, {"a1", params.a1}, {"a2", params.a2},
                 {"num_bins_half", params.num_bins_half}};
  d["h2_to_p1"] = prof.h2_to_p1;
  d["h2_to_p1_expected"] = expected_h2_p1;
  d["h2_to_p1_abs_err"] = h2_err;
  d["h2_to_p2"] = prof.h2_to_p2;
  d["ratio"] = ratio;
  d["ratio_target"] = target_ratio;
  d["ratio_abs_err"] = ratio_err;
  d["runtime_ms"] = runtime;
  d["seed"] = seed;
  return {"hellinger-ratio", pass, std::move(d)};
}

PresetReport chi2_ratio(std::uint64_t seed) {
  Stopwatch sw;
  const FamilyParams params{1.0, 1e6, 1.0, 1000};
  const DistanceProfile prof =
      family_distance_profile(params, FamilySide::PerturbP1);

  const double expected_chi2_p1 = 2.0 / 3.0;
  const double ratio = prof.chi2_to_p2 / prof.chi2_to_p1;
  const double chi_err = std::abs(prof.chi2_to_p1 - expected_chi2_p1);
  const double ratio_err = std::abs(ratio - 3.0);
  const double runtime = sw.ms();
  const bool pass = chi_err <= 1e-12 && ratio_err <= 3e-3 && runtime < 1000.0;

  ordered_json d;
  d["params"] = {{"b", params.b}, {"a1", params.a1}, {"a2", params.a2},
                 {"num_bins_half", params.num_bins_half}};
  d["chi2_to_p1"] = prof.chi2_to_p1;
  d["chi2_to_p1_expected"] = expected_chi2_p1;
  d["chi2_to_p1_abs_err"] = chi_err;
  d["chi2_to_p2"] = prof.chi2_to_p2;
  d["ratio"] = ratio;
  d["ratio_target"] = 3.0;
  d["ratio_abs_err"] = ratio_err;
  d["runtime_ms"] = runtime;
  d["seed"] = seed;
  return {"chi2-ratio", pass, std::move(d)};
}

PresetReport baraud_sign(std::uint64_t seed) {
  Stopwatch sw;
  SplitMix64 rng(seed);
  constexpr int kTriples = 500;
  const double gamma = kBaraudGamma;

  double min_h0_expectation = 0.0;
  double max_h1_expectation = 0.0;
  int built = 0;

  for (int i = 0; i < kTriples; ++i) {
    const std::size_t k = 2 + rng.next_below(19);
    BinnedDistribution p1 = gen::random_distribution(k, rng, 0.15);
    BinnedDistribution p2 = gen::random_distribution(k, rng, 0.15);
    if (hellinger_sq(p1, p2) < 1e-4) {
      --i;
      continue;
    }
    // Walk p toward p1 until the H0 separation holds, then mirror for H1.
    for (double cap = 0.3;; cap *= 0.5) {
      if (cap < 1e-14) throw std::logic_error("baraud_sign: no admissible p");
      const BinnedDistribution p = gen::random_point_near(p1, cap, rng);
      if (gamma * hellinger_sq(p, p1) <= hellinger_sq(p, p2)) {
        min_h0_expectation = std::min(min_h0_expectation,
                                      baraud_expected_statistic(p, p1, p2));
        break;
      }
    }
    for (double cap = 0.3;; cap *= 0.5) {
      if (cap < 1e-14) throw std::logic_error("baraud_sign: no admissible p");
      const BinnedDistribution p = gen::random_point_near(p2, cap, rng);
      if (gamma * hellinger_sq(p, p2) <= hellinger_sq(p, p1)) {
        max_h1_expectation = std::max(max_h1_expectation,
                                      baraud_expected_statistic(p, p1, p2));
        break;
      }
    }
    ++built;
  }

  const double runtime = sw.ms();
  const bool pass = min_h0_expectation >= -1e-12 &&
                    max_h1_expectation <= 1e-12 && built == kTriples &&
                    runtime < 5000.0;

  ordered_json d;
  d["triples_per_side"] = kTriples;
  d["gamma"] = gamma;
  d["min_expected_statistic_under_h0"] = min_h0_expectation;
  d["max_expected_statistic_under_h1"] = max_h1_expectation;
  d["tolerance"] = 1e-12;
  d["runtime_ms"] = runtime;
  d["seed"] = seed;
  return {"baraud-sign", pass, std::move(d)};
}

PresetReport baraud_end_to_end(std::uint64_t seed) {
  Stopwatch sw;
  const auto bern = [](double q, std::string label) {
    return BinnedDistribution::points({1.0 - q, q}, std::move(label));
  };
  const BinnedDistribution p1 = bern(0.1, "bern(0.1)");
  const BinnedDistribution p2 = bern(0.9, "bern(0.9)");

  ExperimentConfig cfg;
  cfg.family = TestFamily::Baraud;
  cfg.p1 = p1;
  cfg.p2 = p2;
  cfg.sample_count = 200;
  cfg.trials = 10000;
  cfg.gamma = 6.0;

  cfg.p = p1;  // truth H0 stream
  cfg.seed = derive_seed(seed, 1);
  const ErrorEstimate under_h0 = estimate_error(cfg);
  cfg.p = p2;  // truth H1 stream
  cfg.seed = derive_seed(seed, 2);
  const ErrorEstimate under_h1 = estimate_error(cfg);

  const double max_error = std::max(under_h0.type1, under_h1.type2);
  const double runtime = sw.ms();
  const bool pass = max_error < 1.0 / 3.0 && runtime < 30000.0;

  ordered_json d;
  d["m"] = cfg.sample_count;
  d["trials_per_stream"] = cfg.trials;
  d["gamma"] = cfg.gamma;
  d["h2_between_models"] = hellinger_sq(p1, p2);
  d["type1"] = under_h0.type1;
  d["type2"] = under_h1.type2;
  d["max_error"] = max_error;
  d["threshold"] = 1.0 / 3.0;
  d["runtime_ms"] = runtime;
  d["seed"] = seed;
  return {"baraud-end-to-end", pass, std::move(d)};
}

PresetReport ml_failure(std::uint64_t seed) {
  Stopwatch sw;
  constexpr double kEps = 0.01;
  const auto [p1, p2, p] = align_three(
      BinnedDistribution::uniform_bins(-1.0, 1.0, 200, "unif[-1,1]"),
      BinnedDistribution::uniform_bins(kEps, 1.0 + kEps, 100, "unif[eps,1+eps]"),
      BinnedDistribution::uniform_bins(0.0, 1.0, 100, "unif[0,1]"));

  ExperimentConfig cfg;
  cfg.family = TestFamily::ML;
  cfg.p1 = p1;
  cfg.p2 = p2;
  cfg.p = p;
  cfg.trials = 10000;

  bool pass = true;
  ordered_json cells = ordered_json::array();
  double error_at_300 = 0.0;
  for (const std::int64_t m : {std::int64_t{50}, std::int64_t{300}}) {
    cfg.sample_count = m;
    cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(m));
    const ErrorEstimate est = estimate_error(cfg);
    const double exact = 1.0 - std::pow(1.0 - kEps, static_cast<double>(m));
    const double measured = est.max_error;
    const bool in_ci = std::abs(measured - exact) <= est.ci_halfwidth;
    pass = pass && in_ci;
    if (m == 300) error_at_300 = measured;
    cells.push_back({{"m", m},
                     {"empirical_error", measured},
                     {"exact_error", exact},
                     {"ci_halfwidth", est.ci_halfwidth},
                     {"within_ci", in_ci}});
  }
  pass = pass && error_at_300 >= 0.9;

  ordered_json d;
  d["epsilon"] = kEps;
  d["h2_p_to_p1"] = hellinger_sq(p, p1);
  d["h2_p_to_p2"] = hellinger_sq(p, p2);
  d["cells"] = std::move(cells);
  d["error_at_m300"] = error_at_300;
  d["error_at_m300_threshold"] = 0.9;
  d["runtime_ms"] = sw.ms();
  d["seed"] = seed;
  return {"ml-failure", pass, std::move(d)};
}

PresetReport collision_schedule(std::uint64_t seed) {
  Stopwatch sw;
  constexpr std::int64_t ms_grid[] = {10, 100, 1000};
  const double threshold = 11.0 / 12.0;
  const std::int64_t c = scan_collision_constant(ms_grid, threshold);

  bool all_above = true;
  ordered_json rows = ordered_json::array();
  for (const std::int64_t m : ms_grid) {
    const std::int64_t n = c * (m - 1) * (m - 1);
    const double pe = collision_probability(n, m);
    all_above = all_above && pe >= threshold;
    rows.push_back({{"m", m}, {"num_bins_half", n}, {"collision_free_prob", pe}});
  }

  const double tvb = conditioning_tv_bound(0.0, 1.0 / 12.0, 1.0 / 12.0);
  const double floor = lecam_floor(1.0 / 3.0);
  const bool tvb_exact = tvb == 1.0 / 3.0;
  const bool floor_exact = floor == 1.0 / 3.0;
  const bool pass = all_above && tvb_exact && floor_exact;

  ordered_json d;
  d["scanned_minimal_c"] = c;
  d["threshold"] = threshold;
  d["schedule"] = std::move(rows);
  d["conditioning_tv_bound(0,1/12,1/12)"] = tvb;
  d["tv_bound_bit_exact_third"] = tvb_exact;
  d["lecam_floor(1/3)"] = floor;
  d["lecam_floor_bit_exact_third"] = floor_exact;
  d["runtime_ms"] = sw.ms();
  d["seed"] = seed;
  return {"collision-schedule", pass, std::move(d)};
}

PresetReport conditional_equality(std::uint64_t seed) {
  Stopwatch sw;
  // Exact conditional equality is a finite-size property: it requires the
  // per-half spike multisets of the two families to agree on all symmetric
  // moments up to order m. These instances satisfy that; generic parameter
  // choices only approach equality as the bin count grows.
  struct Instance {
    FamilyParams params;
    int m;
  };
  const Instance instances[] = {
      {{1.0, 2.0, 1.0, 2}, 1},
      {{0.5, 1.5, 1.5, 3}, 2},
      {{0.5, 1.0, 1.0, 4}, 3},
  };

  bool all_equal = true;
  ordered_json rows = ordered_json::array();
  for (const auto& [params, m] : instances) {
    const bool eq = conditional_equality_check(params, m);
    all_equal = all_equal && eq;
    rows.push_back({{"b", params.b},
                    {"a1", params.a1},
                    {"a2", params.a2},
                    {"num_bins_half", params.num_bins_half},
                    {"m", m},
                    {"conditional_laws_equal", eq}});
  }

  // Single-sample marginal of the uniform-member mixture is uniform.
  double max_marginal_dev = 0.0;
  for (const auto& [params, m] : instances) {
    for (const FamilySide side :
         {FamilySide::PerturbP1, FamilySide::PerturbP2}) {
      const auto members = enumerate_family(params, side);
      const std::size_t bins = members.front().size();
      for (std::size_t i = 0; i < bins; ++i) {
        double mean = 0.0;
        for (const auto& mem : members) mean += mem.mass(i);
        mean /= static_cast<double>(members.size());
        max_marginal_dev = std::max(
            max_marginal_dev, std::abs(mean - 1.0 / static_cast<double>(bins)));
      }
    }
  }

  const bool pass = all_equal && max_marginal_dev <= 1e-13;
  ordered_json d;
  d["instances"] = std::move(rows);
  d["max_uniform_marginal_deviation"] = max_marginal_dev;
  d["marginal_tolerance"] = 1e-13;
  d["runtime_ms"] = sw.ms();
  d["seed"] = seed;
  return {"conditional-equality", pass, std::move(d)};
}

PresetReport lecam_floor_preset(std::uint64_t seed) {
  Stopwatch sw;
  constexpr std::int64_t m = 50;
  constexpr std::int64_t ms_grid[] = {10, 100, 1000};
  const std::int64_t c = scan_collision_constant(ms_grid, 11.0 / 12.0);
  // a1 = 49 divides (m-1)^2 for m = 50, so r1_size stays integral for any C.
  const FamilyParams params{1.0, 49.0, 1.0, c * (m - 1) * (m - 1)};

  const AdversarialErrorEstimate est = indistinguishability_experiment(
      params, m, family_test(TestFamily::Baraud, params), 10000, seed);

  const double pe = collision_probability(params, m);
  const double tvb = conditioning_tv_bound(0.0, 1.0 - pe, 1.0 - pe);
  const double se =
      std::sqrt(est.avg_error * (1.0 - est.avg_error) /
                static_cast<double>(est.trials));
  const double floor_threshold = 1.0 / 3.0 - 3.0 * se;
  const double runtime = sw.ms();
  const bool pass = est.avg_error >= floor_threshold && runtime < 120000.0;

  ordered_json d;
  d["params"] = {{"b", params.b}, {"a1", params.a1}, {"a2", params.a2},
                 {"num_bins_half", params.num_bins_half}};
  d["m"] = m;
  d["trials"] = est.trials;
  d["avg_error"] = est.avg_error;
  d["d1_error"] = est.d1_error;
  d["d2_error"] = est.d2_error;
  d["max_error"] = est.max_error;
  d["stderr"] = se;
  d["floor_threshold"] = floor_threshold;
  d["collision_free_prob"] = pe;
  d["tv_bound"] = tvb;
  d["lecam_floor_of_tv_bound"] = lecam_floor(tvb);
  d["runtime_ms"] = runtime;
  d["seed"] = seed;
  return {"lecam-floor", pass, std::move(d)};
}

PresetReport disjoint_tightness(std::uint64_t seed) {
  Stopwatch sw;
  SplitMix64 rng(seed);
  constexpr int kTriples = 500;
  const double gamma = kLowerBoundGamma;

  double min_p_s1 = 1.0;
  std::int64_t decisions = 0, decision_errors = 0;
  int gap_triples = 0;

  for (int i = 0; i < kTriples; ++i) {
    const std::size_t k1 = 2 + rng.next_below(7);
    const std::size_t k2 = 2 + rng.next_below(7);
    const std::size_t pad = rng.next_below(3);
    const std::size_t total = k1 + k2 + pad;

    const BinnedDistribution inner1 = gen::random_distribution(k1, rng);
    const BinnedDistribution inner2 = gen::random_distribution(k2, rng);
    std::vector<double> m1(total, 0.0), m2(total, 0.0);
    for (std::size_t j = 0; j < k1; ++j) m1[j] = inner1.mass(j);
    for (std::size_t j = 0; j < k2; ++j) m2[k1 + j] = inner2.mass(j);
    const auto p1 = BinnedDistribution::points(std::move(m1), "p1");
    const auto p2 = BinnedDistribution::points(std::move(m2), "p2");

    BinnedDistribution p;
    for (double cap = 0.3;; cap *= 0.5) {
      if (cap < 1e-14) throw std::logic_error("disjoint_tightness: no admissible p");
      p = gen::random_point_near(p1, cap, rng);
      if (gamma * hellinger_sq(p, p1) <= hellinger_sq(p, p2)) break;
    }

    double p_s1 = 0.0, p_s2 = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
      if (p1.mass(j) > 0.0) p_s1 += p.mass(j);
      if (p2.mass(j) > 0.0) p_s2 += p.mass(j);
    }
    min_p_s1 = std::min(min_p_s1, p_s1);

    if (std::abs(p_s1 - p_s2) >= 0.1 && gap_triples < 200) {
      ++gap_triples;
      const RobustTest test =
          RobustTest::prepare({TestFamily::DisjointSupport, p1, p2});
      for (int t = 0; t < 20; ++t) {
        const SampleBatch batch = sample(p, 500, rng.next());
        ++decisions;
        if (test.decide(batch).verdict != Verdict::H0) ++decision_errors;
      }
    }
  }

  const double decision_error_rate =
      decisions > 0 ? static_cast<double>(decision_errors) /
                          static_cast<double>(decisions)
                    : 0.0;
  const bool pass = min_p_s1 >= 0.5 - 1e-12 && gap_triples > 0 &&
                    decision_error_rate < 0.05;

  ordered_json d;
  d["triples"] = kTriples;
  d["gamma"] = gamma;
  d["min_p_s1"] = min_p_s1;
  d["p_s1_threshold"] = 0.5;
  d["gap_triples_tested"] = gap_triples;
  d["decisions"] = decisions;
  d["decision_error_rate"] = decision_error_rate;
  d["decision_error_threshold"] = 0.05;
  d["m"] = 500;
  d["runtime_ms"] = sw.ms();
  d["seed"] = seed;
  return {"disjoint-tightness", pass, std::move(d)};
}

PresetReport composite_radius(std::uint64_t seed) {
  Stopwatch sw;
  SplitMix64 rng(seed);
  constexpr int kPairs = 20;
  constexpr int kPointsPerPair = 100;
  constexpr int kTrialsPerPoint = 5;
  constexpr std::int64_t kM = 500;

  double max_radius_dev = 0.0;
  double min_expectation = 1.0;
  std::int64_t decisions = 0, decision_errors = 0;

  for (int i = 0; i < kPairs; ++i) {
    const std::size_t k = 3 + rng.next_below(10);
    BinnedDistribution p1 = gen::random_distribution(k, rng, 0.1);
    BinnedDistribution p2 = gen::random_distribution(k, rng, 0.1);
    const CriticalRadius r = critical_radius(p1, p2);
    if (r.degenerate || r.value < 0.02) {
      --i;
      continue;
    }

    const BinnedDistribution u = hellinger_midpoint(p1, p2);
    max_radius_dev =
        std::max(max_radius_dev, std::abs(r.value - hellinger_sq(p1, u)));

    const RobustTest test =
        RobustTest::prepare({TestFamily::HellingerMidpoint, p1, p2});
    for (int j = 0; j < kPointsPerPair; ++j) {
      const BinnedDistribution p = gen::random_point_near(p1, 0.8 * r.value, rng);
      min_expectation =
          std::min(min_expectation, midpoint_expected_statistic(p, p1, p2));
      for (int t = 0; t < kTrialsPerPoint; ++t) {
        const SampleBatch batch =
            sample(p, static_cast<std::size_t>(kM), rng.next());
        ++decisions;
        if (test.decide(batch).verdict != Verdict::H0) ++decision_errors;
      }
    }
  }

  const double decision_error_rate =
      static_cast<double>(decision_errors) / static_cast<double>(decisions);
  const bool pass = max_radius_dev <= 1e-10 && min_expectation > 0.0 &&
                    decision_error_rate < 0.05;

  ordered_json d;
  d["pairs"] = kPairs;
  d["points_per_pair"] = kPointsPerPair;
  d["ball_radius_factor"] = 0.8;
  d["m"] = kM;
  d["max_rstar_vs_h2_midpoint_dev"] = max_radius_dev;
  d["radius_tolerance"] = 1e-10;
  d["min_expected_statistic"] = min_expectation;
  d["decisions"] = decisions;
  d["decision_error_rate"] = decision_error_rate;
  d["decision_error_threshold"] = 0.05;
  d["runtime_ms"] = sw.ms();
  d["seed"] = seed;
  return {"composite-radius", pass, std::move(d)};
}

PresetReport divergence_sandwiches(std::uint64_t seed) {
  Stopwatch sw;
  SplitMix64 rng(seed);
  constexpr int kPairs = 1000;
  constexpr double kSlack = 1e-12;

  double worst = 0.0;  // most negative sandwich margin observed
  for (int i = 0; i < kPairs; ++i) {
    const std::size_t k = 2 + rng.next_below(19);
    const double zero_prob = (i % 2 == 0) ? 0.0 : 0.25;
    const BinnedDistribution d1 = gen::random_distribution(k, rng, zero_prob);
    const BinnedDistribution d2 = gen::random_distribution(k, rng, zero_prob);
    const DivergenceReport r = divergence_report(d1, d2);
    worst = std::min({worst,
                      r.hellinger_sq - 0.5 * r.tv * r.tv,
                      r.tv - r.hellinger_sq,
                      r.hellinger_sq - 0.25 * r.sym_chi_sq,
                      0.5 * r.sym_chi_sq - r.hellinger_sq});
  }

  const bool pass = worst >= -kSlack;
  ordered_json d;
  d["pairs"] = kPairs;
  d["worst_sandwich_margin"] = worst;
  d["slack"] = kSlack;
  d["runtime_ms"] = sw.ms();
  d["seed"] = seed;
  return {"divergence-sandwiches", pass, std::move(d)};
}

struct PresetEntry {
  PresetReport (*run)(std::uint64_t seed);
  std::uint64_t default_seed;
};

const std::map<std::string, PresetEntry, std::less<>>& preset_table() {
  static const std::map<std::string, PresetEntry, std::less<>> table{
      {"hellinger-ratio", {hellinger_ratio, 1}},
      {"chi2-ratio", {chi2_ratio, 2}},
      {"baraud-sign", {baraud_sign, 0xBA2A0D03}},
      {"baraud-end-to-end", {baraud_end_to_end, 0xBA2A0D04}},
      {"ml-failure", {ml_failure, 0x31F1A005}},
      {"collision-schedule", {collision_schedule, 6}},
      {"conditional-equality", {conditional_equality, 7}},
      {"lecam-floor", {lecam_floor_preset, 0x1ECA3F08}},
      {"disjoint-tightness", {disjoint_tightness, 0xD1530109}},
      {"composite-radius", {composite_radius, 0xC0360110}},
      {"divergence-sandwiches", {divergence_sandwiches, 0xD1470111}},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, entry] : preset_table()) names.push_back(name);
  return names;
}

PresetReport reproduce_paper(std::string_view preset_name, std::uint64_t seed) {
  const auto it = preset_table().find(preset_name);
  if (it == preset_table().end()) {
    throw std::invalid_argument("unknown preset '" + std::string(preset_name) +
                                "'");
  }
  return it->second.run(seed);
}

PresetReport reproduce_paper(std::string_view preset_name) {
  const auto it = preset_table().find(preset_name);
  if (it == preset_table().end()) {
    throw std::invalid_argument("unknown preset '" + std::string(preset_name) +
                                "'");
  }
  return it->second.run(it->second.default_seed);
}

}  // namespace hrt
