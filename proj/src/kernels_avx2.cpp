// AVX2 variants of the reduction kernels. This translation unit is the only
// one compiled with -mavx2; callers reach it through the dispatch table and
// must check avx2_available() first.

#include "hrt/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace hrt::kernels {
namespace {

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

// Four independent Neumaier accumulators, one per lane.
struct VAcc {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d t = _mm256_add_pd(sum, x);
    const __m256d sum_big = _mm256_cmp_pd(abs_pd(sum), abs_pd(x), _CMP_GE_OQ);
    const __m256d e_sum = _mm256_add_pd(_mm256_sub_pd(sum, t), x);
    const __m256d e_x = _mm256_add_pd(_mm256_sub_pd(x, t), sum);
    comp = _mm256_add_pd(comp, _mm256_blendv_pd(e_x, e_sum, sum_big));
    sum = t;
  }
};

// Scalar Neumaier used for lane merging and loop tails.
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

double finalize(const VAcc& v, Acc tail) {
  alignas(32) double s[4];
  alignas(32) double c[4];
  _mm256_store_pd(s, v.sum);
  _mm256_store_pd(c, v.comp);
  for (int i = 0; i < 4; ++i) {
    tail.add(s[i]);
    tail.add(c[i]);
  }
  return tail.value();
}

double sum_(const double* a, std::size_t n) {
  VAcc v;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) v.add(_mm256_loadu_pd(a + i));
  Acc tail;
  for (; i < n; ++i) tail.add(a[i]);
  return finalize(v, tail);
}

double dot_sqrt_(const double* a, const double* b, std::size_t n) {
  VAcc v;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    v.add(_mm256_sqrt_pd(prod));
  }
  Acc tail;
  for (; i < n; ++i) tail.add(std::sqrt(a[i] * b[i]));
  return finalize(v, tail);
}

double half_sq_diff_sqrt_(const double* a, const double* b, std::size_t n) {
  VAcc v;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_sqrt_pd(_mm256_loadu_pd(a + i)),
                                    _mm256_sqrt_pd(_mm256_loadu_pd(b + i)));
    v.add(_mm256_mul_pd(d, d));
  }
  Acc tail;
  for (; i < n; ++i) {
    const double d = std::sqrt(a[i]) - std::sqrt(b[i]);
    tail.add(d * d);
  }
  return 0.5 * finalize(v, tail);
}

double half_abs_diff_(const double* a, const double* b, std::size_t n) {
  VAcc v;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    v.add(abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  }
  Acc tail;
  for (; i < n; ++i) tail.add(std::abs(a[i] - b[i]));
  return 0.5 * finalize(v, tail);
}

double sym_chi_sq_(const double* a, const double* b, std::size_t n) {
  VAcc v;
  std::size_t i = 0;
  const __m256d zero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d s = _mm256_add_pd(va, vb);
    const __m256d d = _mm256_sub_pd(va, vb);
    const __m256d q = _mm256_div_pd(_mm256_mul_pd(d, d), s);
    // s == 0 lanes would produce NaN; the mask zeroes them out.
    const __m256d pos = _mm256_cmp_pd(s, zero, _CMP_GT_OQ);
    v.add(_mm256_and_pd(q, pos));
  }
  Acc tail;
  for (; i < n; ++i) {
    const double s = a[i] + b[i];
    if (s > 0.0) {
      const double d = a[i] - b[i];
      tail.add(d * d / s);
    }
  }
  return finalize(v, tail);
}

double weighted_sum_(const double* w, const double* p, std::size_t n) {
  VAcc v;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    v.add(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(p + i)));
  }
  Acc tail;
  for (; i < n; ++i) tail.add(w[i] * p[i]);
  return finalize(v, tail);
}

double gather_sum_(const double* w, const std::uint32_t* idx, std::size_t n) {
  VAcc v;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i vi =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    v.add(_mm256_i32gather_pd(w, vi, 8));
  }
  Acc tail;
  for (; i < n; ++i) tail.add(w[idx[i]]);
  return finalize(v, tail);
}

// mul/add (no FMA) keeps results bit-identical with the scalar kernel.
void geodesic_combine_(const double* a, const double* b, double c1, double c2,
                       double* out, std::size_t n) {
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d sa = _mm256_sqrt_pd(_mm256_loadu_pd(a + i));
    const __m256d sb = _mm256_sqrt_pd(_mm256_loadu_pd(b + i));
    const __m256d t =
        _mm256_add_pd(_mm256_mul_pd(vc1, sa), _mm256_mul_pd(vc2, sb));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(t, t));
  }
  for (; i < n; ++i) {
    const double t = c1 * std::sqrt(a[i]) + c2 * std::sqrt(b[i]);
    out[i] = t * t;
  }
}

}  // namespace

const Ops& avx2() {
  static const Ops ops{sum_,          dot_sqrt_,    half_sq_diff_sqrt_,
                       half_abs_diff_, sym_chi_sq_,  weighted_sum_,
                       gather_sum_,    geodesic_combine_, "avx2"};
  return ops;
}

}  // namespace hrt::kernels
