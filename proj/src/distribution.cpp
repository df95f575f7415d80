#include "hrt/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hrt/kernels.hpp"
#include "hrt/rng.hpp"

namespace hrt {
namespace {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// Best rational approximation num/den to x (x > 0) with den <= max_den,
// by continued fractions.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

Rational approx_rational(double x, std::int64_t max_den) {
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double f = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double fa = std::floor(f);
    if (fa > 9.0e18) break;
    const auto a = static_cast<std::int64_t>(fa);
    if (q0 != 0 && a != 0 && q1 > (max_den - q0) / a) break;
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double rem = f - fa;
    if (rem < 1e-13) break;
    f = 1.0 / rem;
  }
  return {p1, q1 == 0 ? 1 : q1};
}

[[noreturn]] void throw_incommensurable(const BinnedDistribution& d1,
                                        const BinnedDistribution& d2,
                                        const char* what) {
  throw std::invalid_argument(
      "align_supports: incommensurable partitions (" + std::string(what) +
      ") for '" + d1.label() + "' [" + format_number(d1.lo()) + ", " +
      format_number(d1.hi()) + ")/" + std::to_string(d1.size()) + " vs '" +
      d2.label() + "' [" + format_number(d2.lo()) + ", " +
      format_number(d2.hi()) + ")/" + std::to_string(d2.size()));
}

// Splits each source bin of `d` into `split` children on a grid that starts
// `offset` child-bins after the output origin. Children receive mass/split
// each except the last, which absorbs the sequential-sum residual so the
// children add back to the parent mass bit-for-bit.
std::vector<double> refine_masses(const BinnedDistribution& d,
                                  std::int64_t offset, std::int64_t split,
                                  std::int64_t total_bins) {
  std::vector<double> out(static_cast<std::size_t>(total_bins), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double m = d.mass(i);
    const double child = m / static_cast<double>(split);
    double running = 0.0;
    const std::size_t base = static_cast<std::size_t>(offset) + i * split;
    for (std::int64_t c = 0; c < split - 1; ++c) {
      out[base + static_cast<std::size_t>(c)] = child;
      running += child;
    }
    out[base + static_cast<std::size_t>(split) - 1] = m - running;
  }
  return out;
}

}  // namespace

BinnedDistribution BinnedDistribution::points(std::vector<double> masses,
                                              std::string label) {
  return {SupportKind::Points, 0.0, 0.0, std::move(masses), std::move(label)};
}

BinnedDistribution BinnedDistribution::bins(double lo, double hi,
                                            std::vector<double> masses,
                                            std::string label) {
  return {SupportKind::Bins, lo, hi, std::move(masses), std::move(label)};
}

BinnedDistribution BinnedDistribution::uniform_bins(double lo, double hi,
                                                    std::size_t count,
                                                    std::string label) {
  std::vector<double> masses(count, count > 0 ? 1.0 / static_cast<double>(count)
                                              : 0.0);
  return bins(lo, hi, std::move(masses), std::move(label));
}

double BinnedDistribution::bin_width() const {
  return (hi_ - lo_) / static_cast<double>(masses_.size());
}

ValidationResult BinnedDistribution::validate() const {
  if (masses_.empty()) return {false, "empty support"};
  if (kind_ == SupportKind::Bins &&
      !(std::isfinite(lo_) && std::isfinite(hi_) && lo_ < hi_)) {
    return {false, "bin interval [" + format_number(lo_) + ", " +
                       format_number(hi_) + ") is not a valid range"};
  }
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (!std::isfinite(masses_[i])) {
      return {false, "non-finite mass at " + std::to_string(i)};
    }
    if (masses_[i] < 0.0) {
      return {false, "negative mass at " + std::to_string(i)};
    }
  }
  const double total = kernels::active().sum(masses_.data(), masses_.size());
  if (std::abs(total - 1.0) > kMassTolerance) {
    return {false, "sum = " + format_number(total)};
  }
  return {};
}

void BinnedDistribution::ensure_valid() const {
  const ValidationResult r = validate();
  if (!r.ok) {
    throw std::invalid_argument("invalid distribution '" + label_ +
                                "': " + r.message);
  }
}

bool BinnedDistribution::same_support(const BinnedDistribution& other) const {
  if (kind_ != other.kind_ || masses_.size() != other.masses_.size()) {
    return false;
  }
  if (kind_ == SupportKind::Bins && (lo_ != other.lo_ || hi_ != other.hi_)) {
    return false;
  }
  return true;
}

SampleBatch sample(const BinnedDistribution& d, std::size_t count,
                   std::uint64_t seed) {
  d.ensure_valid();
  if (count == 0) {
    throw std::invalid_argument("sample: count must be positive");
  }

  std::vector<double> cum(d.size());
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.mass(i) > 0.0) last_positive = i;
    running += d.mass(i);
    cum[i] = running;
  }

  SampleBatch batch;
  batch.seed = seed;
  batch.source_label = d.label();
  batch.atom_indices.resize(count);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.next_double();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cum.begin());
    // u beyond the last cumulative value can only happen through the 1e-12
    // normalization slack; fold it into the last atom that carries mass.
    if (idx >= d.size()) idx = last_positive;
    batch.atom_indices[i] = static_cast<std::uint32_t>(idx);
  }
  return batch;
}

BinnedDistribution mixture(const BinnedDistribution& d1,
                           const BinnedDistribution& d2, double weight) {
  if (!d1.same_support(d2)) {
    throw std::invalid_argument("mixture: mismatched supports ('" +
                                d1.label() + "' vs '" + d2.label() + "')");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw std::invalid_argument("mixture: weight must lie in [0, 1]");
  }
  std::vector<double> masses(d1.size());
  const double w2 = 1.0 - weight;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    masses[i] = weight * d1.mass(i) + w2 * d2.mass(i);
  }
  const std::string label =
      "mix(" + d1.label() + "," + d2.label() + ";" + format_number(weight) + ")";
  if (d1.kind() == SupportKind::Bins) {
    return BinnedDistribution::bins(d1.lo(), d1.hi(), std::move(masses), label);
  }
  return BinnedDistribution::points(std::move(masses), label);
}

std::pair<BinnedDistribution, BinnedDistribution> align_supports(
    const BinnedDistribution& d1, const BinnedDistribution& d2) {
  if (d1.kind() != SupportKind::Bins || d2.kind() != SupportKind::Bins) {
    throw std::invalid_argument(
        "align_supports: both distributions must be interval-bin kind");
  }

  const double w1 = d1.bin_width();
  const double w2 = d2.bin_width();

  // Width ratio must be rational with a modest denominator.
  const Rational pq = approx_rational(w1 / w2, 1 << 16);
  if (pq.num <= 0 ||
      std::abs(w1 / w2 - static_cast<double>(pq.num) / static_cast<double>(pq.den)) >
          1e-9 * (w1 / w2)) {
    throw_incommensurable(d1, d2, "bin widths");
  }
  double w = w1 / static_cast<double>(pq.num);

  // Both origins must land on the same lattice of width w; refine w if the
  // offset is a non-integer rational multiple.
  double delta = (d2.lo() - d1.lo()) / w;
  if (std::abs(delta - std::round(delta)) > 1e-9 * std::max(1.0, std::abs(delta))) {
    const Rational fr = approx_rational(std::abs(delta), 1 << 12);
    if (fr.den <= 1) throw_incommensurable(d1, d2, "offsets");
    w /= static_cast<double>(fr.den);
    delta = (d2.lo() - d1.lo()) / w;
    if (std::abs(delta - std::round(delta)) >
        1e-9 * std::max(1.0, std::abs(delta))) {
      throw_incommensurable(d1, d2, "offsets");
    }
  }

  const double lo = std::min(d1.lo(), d2.lo());
  const double hi = std::max(d1.hi(), d2.hi());
  const double total_f = (hi - lo) / w;
  if (total_f > 2e7) {
    throw std::invalid_argument(
        "align_supports: common refinement needs " + format_number(total_f) +
        " bins, refusing (limit 2e7)");
  }
  const auto total = static_cast<std::int64_t>(std::llround(total_f));
  if (std::abs(total_f - static_cast<double>(total)) > 1e-6) {
    throw_incommensurable(d1, d2, "interval lengths");
  }

  const auto grid_params = [&](const BinnedDistribution& d) {
    const double off_f = (d.lo() - lo) / w;
    const double split_f = d.bin_width() / w;
    const auto off = static_cast<std::int64_t>(std::llround(off_f));
    const auto split = static_cast<std::int64_t>(std::llround(split_f));
    if (split < 1 || std::abs(off_f - static_cast<double>(off)) > 1e-6 ||
        std::abs(split_f - static_cast<double>(split)) > 1e-6) {
      throw_incommensurable(d1, d2, "grid placement");
    }
    return std::pair<std::int64_t, std::int64_t>{off, split};
  };

  const auto [off1, split1] = grid_params(d1);
  const auto [off2, split2] = grid_params(d2);

  auto a1 = BinnedDistribution::bins(lo, hi, refine_masses(d1, off1, split1, total),
                                     d1.label());
  auto a2 = BinnedDistribution::bins(lo, hi, refine_masses(d2, off2, split2, total),
                                     d2.label());
  return {std::move(a1), std::move(a2)};
}

}  // namespace hrt
