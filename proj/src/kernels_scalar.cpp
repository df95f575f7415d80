#include "hrt/kernels.hpp"

#include <cmath>

namespace hrt::kernels {
namespace {

// Neumaier-compensated accumulator.
struct Acc {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

double sum_(const double* a, std::size_t n) {
  Acc acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(a[i]);
  return acc.value();
}

double dot_sqrt_(const double* a, const double* b, std::size_t n) {
  Acc acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(std::sqrt(a[i] * b[i]));
  return acc.value();
}

double half_sq_diff_sqrt_(const double* a, const double* b, std::size_t n) {
  Acc acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::sqrt(a[i]) - std::sqrt(b[i]);
    acc.add(d * d);
  }
  return 0.5 * acc.value();
}

double half_abs_diff_(const double* a, const double* b, std::size_t n) {
  Acc acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(std::abs(a[i] - b[i]));
  return 0.5 * acc.value();
}

double sym_chi_sq_(const double* a, const double* b, std::size_t n) {
  Acc acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = a[i] + b[i];
    if (s > 0.0) {
      const double d = a[i] - b[i];
      acc.add(d * d / s);
    }
  }
  return acc.value();
}

double weighted_sum_(const double* w, const double* p, std::size_t n) {
  Acc acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(w[i] * p[i]);
  return acc.value();
}

double gather_sum_(const double* w, const std::uint32_t* idx, std::size_t n) {
  Acc acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(w[idx[i]]);
  return acc.value();
}

void geodesic_combine_(const double* a, const double* b, double c1, double c2,
                       double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = c1 * std::sqrt(a[i]) + c2 * std::sqrt(b[i]);
    out[i] = t * t;
  }
}

}  // namespace

const Ops& scalar() {
  static const Ops ops{sum_,          dot_sqrt_,    half_sq_diff_sqrt_,
                       half_abs_diff_, sym_chi_sq_,  weighted_sum_,
                       gather_sum_,    geodesic_combine_, "scalar"};
  return ops;
}

}  // namespace hrt::kernels
