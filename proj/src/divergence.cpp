#include "hrt/divergence.hpp"

#include <stdexcept>

#include "hrt/kernels.hpp"

namespace hrt {

void require_aligned(const BinnedDistribution& d1, const BinnedDistribution& d2,
                     const char* op) {
  if (!d1.same_support(d2)) {
    throw std::invalid_argument(std::string(op) + ": mismatched supports ('" +
                                d1.label() + "' vs '" + d2.label() + "')");
  }
}

double hellinger_sq(const BinnedDistribution& d1, const BinnedDistribution& d2) {
  require_aligned(d1, d2, "hellinger_sq");
  return kernels::active().half_sq_diff_sqrt(d1.masses().data(),
                                             d2.masses().data(), d1.size());
}

double bhattacharyya(const BinnedDistribution& d1, const BinnedDistribution& d2) {
  require_aligned(d1, d2, "bhattacharyya");
  return kernels::active().dot_sqrt(d1.masses().data(), d2.masses().data(),
                                    d1.size());
}

double tv(const BinnedDistribution& d1, const BinnedDistribution& d2) {
  require_aligned(d1, d2, "tv");
  return kernels::active().half_abs_diff(d1.masses().data(), d2.masses().data(),
                                         d1.size());
}

double sym_chi_sq(const BinnedDistribution& d1, const BinnedDistribution& d2) {
  require_aligned(d1, d2, "sym_chi_sq");
  return kernels::active().sym_chi_sq(d1.masses().data(), d2.masses().data(),
                                      d1.size());
}

DivergenceReport divergence_report(const BinnedDistribution& d1,
                                   const BinnedDistribution& d2) {
  return {hellinger_sq(d1, d2), bhattacharyya(d1, d2), tv(d1, d2),
          sym_chi_sq(d1, d2)};
}

}  // namespace hrt
