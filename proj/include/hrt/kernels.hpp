#pragma once

#include <cstddef>
#include <cstdint>

namespace hrt::kernels {

// Function table for the hot array reductions shared by the divergence and
// test-statistic code. Every entry computes the same mathematical quantity;
// variants differ only in instruction set. All reductions are compensated
// (Neumaier), so results are accurate to a few ulps even on multi-million-bin
// grids.
struct Ops {
  // sum(a) = sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // dot_sqrt(a, b) = sum_i sqrt(a[i] * b[i])          (Bhattacharyya core)
  double (*dot_sqrt)(const double* a, const double* b, std::size_t n);
  // half_sq_diff_sqrt(a, b) = 0.5 * sum_i (sqrt(a[i]) - sqrt(b[i]))^2
  double (*half_sq_diff_sqrt)(const double* a, const double* b, std::size_t n);
  // half_abs_diff(a, b) = 0.5 * sum_i |a[i] - b[i]|    (total variation)
  double (*half_abs_diff)(const double* a, const double* b, std::size_t n);
  // sym_chi_sq(a, b) = sum_i (a-b)^2 / (a+b), terms with a+b == 0 contribute 0
  double (*sym_chi_sq)(const double* a, const double* b, std::size_t n);
  // weighted_sum(w, p) = sum_i w[i] * p[i]             (exact expectations)
  double (*weighted_sum)(const double* w, const double* p, std::size_t n);
  // gather_sum(w, idx) = sum_i w[idx[i]]               (batch statistics)
  double (*gather_sum)(const double* w, const std::uint32_t* idx, std::size_t n);
  // out[i] = (c1*sqrt(a[i]) + c2*sqrt(b[i]))^2         (geodesic points)
  void (*geodesic_combine)(const double* a, const double* b, double c1,
                           double c2, double* out, std::size_t n);
  const char* name;
};

// Scalar reference implementation; always available.
const Ops& scalar();

// AVX2 implementation. Falls back to scalar() when the build or the CPU
// does not support it; check avx2_available() before relying on it.
const Ops& avx2();
bool avx2_available() noexcept;

// Table selected at first use: AVX2 when supported, scalar otherwise.
// Environment variable HRT_KERNELS=scalar|avx2 forces the choice (an avx2
// request on unsupported hardware falls back to scalar).
const Ops& active();

}  // namespace hrt::kernels
