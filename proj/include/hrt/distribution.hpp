#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hrt {

enum class SupportKind { Points, Bins };

struct ValidationResult {
  bool ok = true;
  std::string message;  // names the failing invariant and the offending index

  explicit operator bool() const { return ok; }
};

// Absolute tolerance on the mass total. All constructions in this library are
// finite sums of exact rationals, so anything looser hides real bugs.
inline constexpr double kMassTolerance = 1e-12;

/// A probability distribution with finite support: either bare atoms
/// ("points") or an equal-width partition of [lo, hi) ("bins"). A density
/// value v on a bin of width w is stored as the mass v*w, which turns every
/// integral over piecewise-constant densities into an exact finite sum.
///
/// Instances are immutable after construction and safe to share across
/// threads.
class BinnedDistribution {
 public:
  BinnedDistribution() = default;

  static BinnedDistribution points(std::vector<double> masses,
                                   std::string label = {});
  static BinnedDistribution bins(double lo, double hi,
                                 std::vector<double> masses,
                                 std::string label = {});
  /// Uniform density over [lo, hi) carved into `count` equal-width bins.
  static BinnedDistribution uniform_bins(double lo, double hi,
                                         std::size_t count,
                                         std::string label = {});

  SupportKind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double bin_width() const;
  std::size_t size() const { return masses_.size(); }
  std::span<const double> masses() const { return masses_; }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::string& label() const { return label_; }

  /// Total function: never throws, reports the first violated invariant.
  ValidationResult validate() const;
  /// Throws std::invalid_argument with the validation message.
  void ensure_valid() const;

  /// Same kind, same atom count, and for bins the same interval.
  bool same_support(const BinnedDistribution& other) const;

  bool operator==(const BinnedDistribution& other) const = default;

 private:
  BinnedDistribution(SupportKind kind, double lo, double hi,
                     std::vector<double> masses, std::string label)
      : kind_(kind), lo_(lo), hi_(hi), masses_(std::move(masses)),
        label_(std::move(label)) {}

  SupportKind kind_ = SupportKind::Points;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> masses_;
  std::string label_;
};

/// A batch of i.i.d. draws, recorded as indices into the generating
/// distribution's support.
struct SampleBatch {
  std::vector<std::uint32_t> atom_indices;
  std::uint64_t seed = 0;
  std::string source_label;
};

/// `count` i.i.d. draws from d's categorical law. Identical (d, count, seed)
/// yields bit-identical output; no shared state, so concurrent calls with
/// distinct seeds are race-free.
SampleBatch sample(const BinnedDistribution& d, std::size_t count,
                   std::uint64_t seed);

/// Pointwise weight*d1 + (1-weight)*d2 on a shared support partition.
BinnedDistribution mixture(const BinnedDistribution& d1,
                           const BinnedDistribution& d2, double weight);

/// Re-expresses two interval-bin distributions on the common refinement
/// covering the union of their intervals. Requires commensurable bin widths
/// and offsets (rational ratios); per-bin masses are preserved exactly
/// (children of a split bin sum to the parent mass bit-for-bit).
std::pair<BinnedDistribution, BinnedDistribution> align_supports(
    const BinnedDistribution& d1, const BinnedDistribution& d2);

}  // namespace hrt
