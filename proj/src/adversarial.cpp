#include "hrt/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hrt/divergence.hpp"
#include "hrt/rng.hpp"
#include "parallel.hpp"

namespace hrt {
namespace {

constexpr double kIntegralTol = 1e-9;

double size_fraction_times_n(double b, double a, std::int64_t n) {
  return (b / a) * static_cast<double>(n);
}

std::int64_t integral_size(double b, double a, std::int64_t n, const char* which) {
  const double s = size_fraction_times_n(b, a, n);
  const double r = std::round(s);
  if (std::abs(s - r) > kIntegralTol || r < 0.0) {
    throw std::invalid_argument(
        std::string("FamilyParams: ") + which + " = (b/a)*N = " +
        std::to_string(s) + " is not an integer; pick parameters that divide");
  }
  return static_cast<std::int64_t>(r);
}

// One half of a member: `spiked` bins at density `spike`, the rest at `base`.
struct HalfSpec {
  std::int64_t spiked = 0;
  double spike = 0.0;
  double base = 0.0;
};

// The low/high half layout of a member on the given side. PerturbP2 is the
// half-swapped mirror of PerturbP1, which is what keeps the added and removed
// mass balanced at 0.5*b on both sides.
struct MemberLayout {
  HalfSpec low, high;
};

MemberLayout layout_for(const FamilyParams& p, FamilySide side) {
  const HalfSpec add_half{p.r1_size(), 1.0 - p.b + p.a1, 1.0 - p.b};
  const HalfSpec remove_half{p.r2_size(), 1.0 + p.b - p.a2, 1.0 + p.b};
  if (side == FamilySide::PerturbP1) return {add_half, remove_half};
  return {remove_half, add_half};
}

void check_subset(std::span<const std::uint32_t> set, std::int64_t expected,
                  std::int64_t n, const char* name) {
  if (static_cast<std::int64_t>(set.size()) != expected) {
    throw std::invalid_argument(std::string("make_member: |") + name +
                                "| = " + std::to_string(set.size()) +
                                ", expected " + std::to_string(expected));
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const std::uint32_t idx : set) {
    if (idx >= static_cast<std::uint64_t>(n)) {
      throw std::invalid_argument(std::string("make_member: ") + name +
                                  " index " + std::to_string(idx) +
                                  " outside [0, " + std::to_string(n) + ")");
    }
    if (seen[idx]) {
      throw std::invalid_argument(std::string("make_member: ") + name +
                                  " repeats index " + std::to_string(idx));
    }
    seen[idx] = true;
  }
}

double sq(double x) { return x * x; }

double chi_term(double num_sq, double den) {
  return den > 0.0 ? num_sq / den : 0.0;
}

std::int64_t binomial_count(std::int64_t n, std::int64_t k, std::int64_t cap) {
  std::int64_t c = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > cap) return cap + 1;
  }
  return c;
}

// Emits every size-k subset of [0, n) in lexicographic order.
template <typename Fn>
void for_each_subset(std::int64_t n, std::int64_t k, Fn&& fn) {
  std::vector<std::uint32_t> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(std::span<const std::uint32_t>(idx));
    std::int64_t i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] ==
                         static_cast<std::uint32_t>(n - k + i)) {
      --i;
    }
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (std::int64_t j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace

void FamilyParams::validate() const {
  if (!(b > 0.0 && b <= 1.0)) {
    throw std::invalid_argument("FamilyParams: need 0 < b <= 1, got b = " +
                                std::to_string(b));
  }
  if (!(a1 >= b)) {
    throw std::invalid_argument("FamilyParams: need a1 >= b");
  }
  if (!(a2 >= b && a2 <= 1.0 + b)) {
    throw std::invalid_argument("FamilyParams: need b <= a2 <= 1 + b");
  }
  if (num_bins_half < 1) {
    throw std::invalid_argument("FamilyParams: need num_bins_half >= 1");
  }
}

bool FamilyParams::sizes_integral() const {
  const double s1 = size_fraction_times_n(b, a1, num_bins_half);
  const double s2 = size_fraction_times_n(b, a2, num_bins_half);
  return std::abs(s1 - std::round(s1)) <= kIntegralTol &&
         std::abs(s2 - std::round(s2)) <= kIntegralTol;
}

std::int64_t FamilyParams::r1_size() const {
  return integral_size(b, a1, num_bins_half, "r1_size");
}

std::int64_t FamilyParams::r2_size() const {
  return integral_size(b, a2, num_bins_half, "r2_size");
}

std::pair<BinnedDistribution, BinnedDistribution> base_pair(
    double b, std::int64_t num_bins_half) {
  FamilyParams probe{b, std::max(b, 1.0), std::max(b, 1.0), num_bins_half};
  probe.validate();
  const std::size_t n = static_cast<std::size_t>(num_bins_half);
  const double low = (1.0 - b) / static_cast<double>(2 * n);
  const double high = (1.0 + b) / static_cast<double>(2 * n);
  std::vector<double> m1(2 * n), m2(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    m1[i] = low;
    m1[n + i] = high;
    m2[i] = high;
    m2[n + i] = low;
  }
  return {BinnedDistribution::bins(0.0, 1.0, std::move(m1), "p1"),
          BinnedDistribution::bins(0.0, 1.0, std::move(m2), "p2")};
}

PerturbedMember make_member(const FamilyParams& params,
                            std::span<const std::uint32_t> r1,
                            std::span<const std::uint32_t> r2,
                            FamilySide side) {
  params.validate();
  const std::int64_t n = params.num_bins_half;
  check_subset(r1, params.r1_size(), n, "r1");
  check_subset(r2, params.r2_size(), n, "r2");

  const MemberLayout lay = layout_for(params, side);
  const double inv = 1.0 / static_cast<double>(2 * n);
  std::vector<double> masses(static_cast<std::size_t>(2 * n));
  for (std::int64_t i = 0; i < n; ++i) {
    masses[static_cast<std::size_t>(i)] = lay.low.base * inv;
    masses[static_cast<std::size_t>(n + i)] = lay.high.base * inv;
  }
  // r1 always marks the bins carrying the +a1 perturbation and r2 the bins
  // carrying the -a2 perturbation, whichever half those live in.
  const std::span<const std::uint32_t> low_set =
      side == FamilySide::PerturbP1 ? r1 : r2;
  const std::span<const std::uint32_t> high_set =
      side == FamilySide::PerturbP1 ? r2 : r1;
  for (const std::uint32_t i : low_set) {
    masses[i] = lay.low.spike * inv;
  }
  for (const std::uint32_t i : high_set) {
    masses[static_cast<std::size_t>(n) + i] = lay.high.spike * inv;
  }

  PerturbedMember member;
  member.r1.assign(r1.begin(), r1.end());
  member.r2.assign(r2.begin(), r2.end());
  member.side = side;
  member.distribution = BinnedDistribution::bins(
      0.0, 1.0, std::move(masses),
      side == FamilySide::PerturbP1 ? "perturbed-p1" : "perturbed-p2");
  return member;
}

DistanceProfile family_distance_profile(const FamilyParams& params,
                                        FamilySide side) {
  params.validate();
  const double b = params.b, a1 = params.a1, a2 = params.a2;
  const double s1f = b / a1;
  const double s2f = b / a2;
  const double low_base = 1.0 - b, low_spk = 1.0 - b + a1;
  const double up_base = 1.0 + b, up_spk = 1.0 + b - a2;

  // Distances of a PerturbP1 member to its own base p1 and to p2; the
  // PerturbP2 profile is the same pair swapped (members and bases are
  // simultaneous half-swaps, which every divergence is invariant under).
  const double h2_self =
      0.25 * (s1f * sq(std::sqrt(low_spk) - std::sqrt(low_base)) +
              s2f * sq(std::sqrt(up_spk) - std::sqrt(up_base)));
  const double h2_other =
      0.25 * (s1f * sq(std::sqrt(low_spk) - std::sqrt(up_base)) +
              (1.0 - s1f) * sq(std::sqrt(low_base) - std::sqrt(up_base)) +
              s2f * sq(std::sqrt(up_spk) - std::sqrt(low_base)) +
              (1.0 - s2f) * sq(std::sqrt(up_base) - std::sqrt(low_base)));
  const double chi_self = 0.5 * (s1f * chi_term(a1 * a1, low_spk + low_base) +
                                 s2f * chi_term(a2 * a2, up_spk + up_base));
  const double chi_other =
      0.5 * (s1f * chi_term(sq(a1 - 2.0 * b), low_spk + up_base) +
             (1.0 - s1f) * chi_term(sq(2.0 * b), low_base + up_base) +
             s2f * chi_term(sq(2.0 * b - a2), up_spk + low_base) +
             (1.0 - s2f) * chi_term(sq(2.0 * b), up_base + low_base));

  if (side == FamilySide::PerturbP1) {
    return {h2_self, h2_other, chi_self, chi_other};
  }
  return {h2_other, h2_self, chi_other, chi_self};
}

double collision_probability(std::int64_t num_bins_half, std::int64_t m) {
  if (num_bins_half < 1) {
    throw std::invalid_argument("collision_probability: need N >= 1");
  }
  if (m < 1) {
    throw std::invalid_argument("collision_probability: need m >= 1");
  }
  const double bins = static_cast<double>(2 * num_bins_half);
  if (static_cast<double>(m - 1) >= bins) return 0.0;  // pigeonhole
  double prod = 1.0;
  for (std::int64_t i = 1; i < m; ++i) {
    prod *= 1.0 - static_cast<double>(i) / bins;
  }
  return prod;
}

double collision_probability(const FamilyParams& params, std::int64_t m) {
  params.validate();
  return collision_probability(params.num_bins_half, m);
}

std::int64_t scan_collision_constant(std::span<const std::int64_t> ms,
                                     double threshold) {
  for (std::int64_t c = 1; c <= 1024; ++c) {
    bool ok = true;
    for (const std::int64_t m : ms) {
      const std::int64_t n = c * (m - 1) * (m - 1);
      if (n < 1 || collision_probability(n, m) < threshold) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
  throw std::runtime_error("scan_collision_constant: no C <= 1024 works");
}

double conditioning_tv_bound(double tv_conditional, double mass_u_comp,
                             double mass_v_comp) {
  for (const double x : {tv_conditional, mass_u_comp, mass_v_comp}) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("conditioning_tv_bound: inputs must lie in [0, 1]");
    }
  }
  return std::min(1.0, tv_conditional + 2.0 * mass_u_comp + 2.0 * mass_v_comp);
}

double lecam_floor(double tv) {
  if (!(tv >= 0.0 && tv <= 1.0)) {
    throw std::invalid_argument("lecam_floor: tv must lie in [0, 1]");
  }
  // 0.5 - 0.5*tv instead of (1 - tv)/2: for tv = fl(1/3) the former rounds
  // back to fl(1/3) exactly, the latter lands one ulp high.
  return 0.5 - 0.5 * tv;
}

std::vector<BinnedDistribution> enumerate_family(const FamilyParams& params,
                                                 FamilySide side) {
  params.validate();
  const std::int64_t n = params.num_bins_half;
  const std::int64_t s1 = params.r1_size();
  const std::int64_t s2 = params.r2_size();
  constexpr std::int64_t kCap = 1'000'000;
  const std::int64_t c1 = binomial_count(n, s1, kCap);
  const std::int64_t c2 = binomial_count(n, s2, kCap);
  if (c1 > kCap / std::max<std::int64_t>(c2, 1)) {
    throw std::invalid_argument("enumerate_family: family too large to list");
  }

  std::vector<BinnedDistribution> members;
  members.reserve(static_cast<std::size_t>(c1 * c2));
  for_each_subset(n, s1, [&](std::span<const std::uint32_t> r1) {
    for_each_subset(n, s2, [&](std::span<const std::uint32_t> r2) {
      members.push_back(make_member(params, r1, r2, side).distribution);
    });
  });
  return members;
}

bool conditional_laws_equal(std::span<const BinnedDistribution> family_a,
                            std::span<const BinnedDistribution> family_b,
                            int m, double tol) {
  if (family_a.empty() || family_b.empty()) {
    throw std::invalid_argument("conditional_laws_equal: empty family");
  }
  if (m < 1) {
    throw std::invalid_argument("conditional_laws_equal: need m >= 1");
  }
  const std::size_t bins = family_a.front().size();
  for (const auto& d : family_a) {
    if (d.size() != bins) {
      throw std::invalid_argument("conditional_laws_equal: ragged family");
    }
  }
  for (const auto& d : family_b) {
    if (d.size() != bins) {
      throw std::invalid_argument("conditional_laws_equal: ragged family");
    }
  }

  double tuples = 1.0;
  for (int i = 0; i < m; ++i) tuples *= static_cast<double>(bins - static_cast<std::size_t>(i));
  if (tuples > 2e6) {
    throw std::invalid_argument("conditional_laws_equal: instance too large");
  }

  // Mean over members of the product of masses along one ordered tuple.
  const auto tuple_weight = [](std::span<const BinnedDistribution> family,
                               std::span<const std::uint32_t> t) {
    double total = 0.0;
    for (const auto& d : family) {
      double prod = 1.0;
      for (const std::uint32_t idx : t) prod *= d.mass(idx);
      total += prod;
    }
    return total / static_cast<double>(family.size());
  };

  // First pass: normalizers (probability of the all-distinct event E).
  std::vector<std::uint32_t> tuple;
  std::vector<bool> used(bins, false);
  std::vector<double> wa, wb;
  const std::function<void()> recurse = [&] {
    if (static_cast<int>(tuple.size()) == m) {
      wa.push_back(tuple_weight(family_a, tuple));
      wb.push_back(tuple_weight(family_b, tuple));
      return;
    }
    for (std::uint32_t i = 0; i < bins; ++i) {
      if (used[i]) continue;
      used[i] = true;
      tuple.push_back(i);
      recurse();
      tuple.pop_back();
      used[i] = false;
    }
  };
  recurse();

  double za = 0.0, zb = 0.0;
  for (const double w : wa) za += w;
  for (const double w : wb) zb += w;
  if (za == 0.0 && zb == 0.0) return true;  // E has no mass under either law
  if (za == 0.0 || zb == 0.0) return false;

  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (std::abs(wa[i] / za - wb[i] / zb) > tol) return false;
  }
  return true;
}

bool conditional_equality_check(const FamilyParams& params, int m, double tol) {
  params.validate();
  if (2 * params.num_bins_half > 12 || m > 3 || m < 1) {
    throw std::invalid_argument(
        "conditional_equality_check: exact enumeration needs 2N <= 12 and "
        "1 <= m <= 3");
  }
  const auto d1 = enumerate_family(params, FamilySide::PerturbP1);
  const auto d2 = enumerate_family(params, FamilySide::PerturbP2);
  return conditional_laws_equal(d1, d2, m, tol);
}

namespace {

// Draws one member (as its two spiked index sets, via partial Fisher-Yates)
// and then m samples from it, without materializing the 2N-vector.
class MemberSampler {
 public:
  MemberSampler(const FamilyParams& params, FamilySide side)
      : n_(params.num_bins_half), lay_(layout_for(params, side)) {
    const double inv = 1.0 / static_cast<double>(2 * n_);
    const double low_spiked_mass =
        static_cast<double>(lay_.low.spiked) * lay_.low.spike * inv;
    const double low_base_mass =
        static_cast<double>(n_ - lay_.low.spiked) * lay_.low.base * inv;
    const double high_spiked_mass =
        static_cast<double>(lay_.high.spiked) * lay_.high.spike * inv;
    cut1_ = low_spiked_mass;
    cut2_ = cut1_ + low_base_mass;
    cut3_ = cut2_ + high_spiked_mass;
    perm_low_.resize(static_cast<std::size_t>(n_));
    perm_high_.resize(static_cast<std::size_t>(n_));
  }

  void draw(SplitMix64& rng, std::span<std::uint32_t> out) {
    shuffle_prefix(perm_low_, lay_.low.spiked, rng);
    shuffle_prefix(perm_high_, lay_.high.spiked, rng);
    for (std::uint32_t& atom : out) {
      const double u = rng.next_double();
      if (u < cut1_) {
        atom = pick(perm_low_, 0, lay_.low.spiked, rng);
      } else if (u < cut2_) {
        atom = pick(perm_low_, lay_.low.spiked, n_ - lay_.low.spiked, rng);
      } else if (u < cut3_) {
        atom = static_cast<std::uint32_t>(n_) +
               pick(perm_high_, 0, lay_.high.spiked, rng);
      } else {
        atom = static_cast<std::uint32_t>(n_) +
               pick(perm_high_, lay_.high.spiked, n_ - lay_.high.spiked, rng);
      }
    }
  }

 private:
  static void shuffle_prefix(std::vector<std::uint32_t>& perm, std::int64_t k,
                             SplitMix64& rng) {
    std::iota(perm.begin(), perm.end(), 0);
    const auto n = static_cast<std::int64_t>(perm.size());
    for (std::int64_t i = 0; i < k; ++i) {
      const std::int64_t j =
          i + static_cast<std::int64_t>(rng.next_below(
                  static_cast<std::uint64_t>(n - i)));
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(j)]);
    }
  }

  static std::uint32_t pick(const std::vector<std::uint32_t>& perm,
                            std::int64_t offset, std::int64_t count,
                            SplitMix64& rng) {
    const std::int64_t k =
        static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(count)));
    return perm[static_cast<std::size_t>(offset + k)];
  }

  std::int64_t n_;
  MemberLayout lay_;
  double cut1_ = 0.0, cut2_ = 0.0, cut3_ = 0.0;
  std::vector<std::uint32_t> perm_low_, perm_high_;
};

}  // namespace

AdversarialErrorEstimate indistinguishability_experiment(
    const FamilyParams& params, std::int64_t m, const VerdictFn& test,
    std::int64_t trials, std::uint64_t seed, int threads) {
  params.validate();
  (void)params.r1_size();  // members must be constructible
  (void)params.r2_size();
  if (trials < 1) {
    throw std::invalid_argument("indistinguishability_experiment: no trials");
  }
  if (m < 1) {
    throw std::invalid_argument("indistinguishability_experiment: need m >= 1");
  }

  struct Tally {
    std::int64_t d1_trials = 0, d1_errors = 0;
    std::int64_t d2_trials = 0, d2_errors = 0;
  };
  const int nthreads = detail::resolve_threads(threads);
  std::vector<Tally> tallies(static_cast<std::size_t>(
      std::max<std::int64_t>(1, std::min<std::int64_t>(nthreads, trials))));

  detail::parallel_chunks(
      trials, nthreads, [&](int chunk, std::int64_t begin, std::int64_t end) {
        MemberSampler sampler_d1(params, FamilySide::PerturbP1);
        MemberSampler sampler_d2(params, FamilySide::PerturbP2);
        std::vector<std::uint32_t> atoms(static_cast<std::size_t>(m));
        Tally& t = tallies[static_cast<std::size_t>(chunk)];
        for (std::int64_t trial = begin; trial < end; ++trial) {
          SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
          const bool side_d1 = rng.next_bit();
          (side_d1 ? sampler_d1 : sampler_d2).draw(rng, atoms);
          const Verdict v = test(atoms);
          if (side_d1) {
            ++t.d1_trials;
            if (v == Verdict::H1) ++t.d1_errors;
          } else {
            ++t.d2_trials;
            if (v == Verdict::H0) ++t.d2_errors;
          }
        }
      });

  Tally total;
  for (const Tally& t : tallies) {
    total.d1_trials += t.d1_trials;
    total.d1_errors += t.d1_errors;
    total.d2_trials += t.d2_trials;
    total.d2_errors += t.d2_errors;
  }

  AdversarialErrorEstimate est;
  est.trials = trials;
  est.d1_trials = total.d1_trials;
  est.d2_trials = total.d2_trials;
  est.seed = seed;
  est.d1_error = total.d1_trials > 0
                     ? static_cast<double>(total.d1_errors) /
                           static_cast<double>(total.d1_trials)
                     : 0.0;
  est.d2_error = total.d2_trials > 0
                     ? static_cast<double>(total.d2_errors) /
                           static_cast<double>(total.d2_trials)
                     : 0.0;
  est.avg_error = static_cast<double>(total.d1_errors + total.d2_errors) /
                  static_cast<double>(trials);
  est.max_error = std::max(est.d1_error, est.d2_error);
  est.ci_halfwidth = detail::wilson_halfwidth(est.avg_error, trials);
  return est;
}

VerdictFn family_test(TestFamily family, const FamilyParams& params) {
  auto [p1, p2] = base_pair(params.b, params.num_bins_half);
  auto prepared = std::make_shared<RobustTest>(
      RobustTest::prepare({family, std::move(p1), std::move(p2)}));
  return [prepared](std::span<const std::uint32_t> atoms) {
    return prepared->decide(atoms).verdict;
  };
}

}  // namespace hrt
