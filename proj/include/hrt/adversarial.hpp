#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hrt/distribution.hpp"
#include "hrt/hypothesis_tests.hpp"

namespace hrt {

/// Parameters of the perturbed two-family construction on [0, 1] split into
/// 2 * num_bins_half equal bins. The base pair has density 1 -/+ b on the two
/// halves; members move 0.5*b of mass by adding a1 on a fraction b/a1 of the
/// low-density half and removing a2 on a fraction b/a2 of the high-density
/// half.
///
/// r1_size = (b/a1) * N and r2_size = (b/a2) * N must be exact integers for
/// members to exist; validate() only checks the parameter ranges, so closed
/// forms (which do not depend on N) stay available at non-integral settings,
/// and the integrality check happens where members are actually built.
struct FamilyParams {
  double b = 1.0;              // in (0, 1]
  double a1 = 1.0;             // >= b
  double a2 = 1.0;             // in [b, 1+b]
  std::int64_t num_bins_half = 1;  // N

  void validate() const;       // throws std::invalid_argument on bad ranges
  bool sizes_integral() const;
  std::int64_t r1_size() const;  // throws unless integral
  std::int64_t r2_size() const;
};

enum class FamilySide { PerturbP1, PerturbP2 };  // the D1 / D2 families

struct PerturbedMember {
  std::vector<std::uint32_t> r1, r2;  // 0-based indices into [0, N)
  FamilySide side = FamilySide::PerturbP1;
  BinnedDistribution distribution;    // on 2N bins of [0, 1)
};

/// The base pair: p1 has density 1-b on [0, 0.5) and 1+b on [0.5, 1);
/// p2 is the mirror image. Both on 2 * num_bins_half bins.
std::pair<BinnedDistribution, BinnedDistribution> base_pair(
    double b, std::int64_t num_bins_half);

/// Builds one family member from explicit index sets. For PerturbP1 the
/// low half takes density 1-b+a1 on r1 and the high half 1+b-a2 on r2;
/// PerturbP2 is the half-swapped mirror (1+b-a2 on r2 within the low half,
/// 1-b+a1 on r1 within the high half). Either way the added and removed
/// mass both equal 0.5*b.
PerturbedMember make_member(const FamilyParams& params,
                            std::span<const std::uint32_t> r1,
                            std::span<const std::uint32_t> r2,
                            FamilySide side);

/// Hellinger and symmetric chi-squared distances from any family member to
/// the two base distributions. Identical across members of a family (they
/// depend only on |r1| and |r2|), closed-form, independent of N.
struct DistanceProfile {
  double h2_to_p1 = 0.0;
  double h2_to_p2 = 0.0;
  double chi2_to_p1 = 0.0;
  double chi2_to_p2 = 0.0;
};

DistanceProfile family_distance_profile(const FamilyParams& params,
                                        FamilySide side);

/// Exact probability that m i.i.d. samples from the uniform [0,1] marginal
/// leave at most one sample per bin: prod_{i=1}^{m-1} (1 - i/(2N)).
double collision_probability(std::int64_t num_bins_half, std::int64_t m);
double collision_probability(const FamilyParams& params, std::int64_t m);

/// Smallest integer C such that with N = C*(m-1)^2 the no-collision
/// probability is >= threshold for every m in the list.
std::int64_t scan_collision_constant(std::span<const std::int64_t> ms,
                                     double threshold);

/// TV(u, v) <= TV(u|E, v|E) + 2 u(E^c) + 2 v(E^c), capped at 1.
double conditioning_tv_bound(double tv_conditional, double mass_u_comp,
                             double mass_v_comp);

/// Le Cam: any test distinguishing two laws errs with probability at least
/// (1 - TV)/2.
double lecam_floor(double tv);

/// All members of one family (every subset pair of the right sizes).
/// Guarded: refuses families with more than ~1e6 members.
std::vector<BinnedDistribution> enumerate_family(const FamilyParams& params,
                                                 FamilySide side);

/// Exhaustively compares the laws of "pick a member uniformly, draw m i.i.d.
/// samples" between two member lists, conditioned on the event E that all m
/// samples land in distinct bins. True iff the conditional laws agree within
/// tol on every ordered tuple. Member lists need not be normalized.
bool conditional_laws_equal(std::span<const BinnedDistribution> family_a,
                            std::span<const BinnedDistribution> family_b,
                            int m, double tol);

/// conditional_laws_equal applied to the two families of `params`. Requires a
/// desk-size instance (2N <= 12, m <= 3); throws otherwise.
bool conditional_equality_check(const FamilyParams& params, int m,
                                double tol = 1e-12);

/// Monte Carlo error estimate for a concrete test against the two-family
/// mixture: each trial picks a side uniformly, a member uniformly within the
/// side, draws m samples, and scores the verdict (H0 is correct on the
/// PerturbP1 side). Trials are seeded independently and merge
/// deterministically, so results do not depend on thread scheduling.
struct AdversarialErrorEstimate {
  double d1_error = 0.0;      // error rate among PerturbP1-side trials
  double d2_error = 0.0;      // error rate among PerturbP2-side trials
  double avg_error = 0.0;     // error rate over all trials (the Le Cam average)
  double max_error = 0.0;     // max of the per-side rates
  double ci_halfwidth = 0.0;  // Wilson 95% halfwidth on avg_error
  std::int64_t trials = 0, d1_trials = 0, d2_trials = 0;
  std::uint64_t seed = 0;
};

using VerdictFn = std::function<Verdict(std::span<const std::uint32_t>)>;

AdversarialErrorEstimate indistinguishability_experiment(
    const FamilyParams& params, std::int64_t m, const VerdictFn& test,
    std::int64_t trials, std::uint64_t seed, int threads = 0);

/// A VerdictFn running the named test family against the base pair of
/// `params`; the callable is stateless after construction and thread-safe.
VerdictFn family_test(TestFamily family, const FamilyParams& params);

}  // namespace hrt
