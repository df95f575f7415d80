#include "hrt/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace hrt::kernels {

#if !defined(HRT_HAVE_AVX2_TU)
// Build without the AVX2 translation unit: keep the API but route to scalar.
const Ops& avx2() { return scalar(); }
bool avx2_available() noexcept { return false; }
#else
bool avx2_available() noexcept {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}
#endif

const Ops& active() {
  static const Ops& chosen = []() -> const Ops& {
    const char* env = std::getenv("HRT_KERNELS");
    if (env != nullptr) {
      if (std::strcmp(env, "scalar") == 0) return scalar();
      if (std::strcmp(env, "avx2") == 0 && avx2_available()) return avx2();
      return scalar();
    }
    return avx2_available() ? avx2() : scalar();
  }();
  return chosen;
}

}  // namespace hrt::kernels
