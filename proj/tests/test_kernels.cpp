#include "hrt/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "hrt/rng.hpp"

using hrt::SplitMix64;
namespace kernels = hrt::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed,
                                  double zero_prob) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (double& x : v) {
    if (rng.next_double() < zero_prob) {
      x = 0.0;
    } else {
      // Mix magnitudes so compensation and sqrt paths see a spread.
      const double mag = std::pow(10.0, -6.0 + 12.0 * rng.next_double());
      x = mag * rng.next_double();
    }
  }
  return v;
}

void check_close(double got, double want, double scale) {
  CHECK(std::abs(got - want) <= 1e-13 * std::max(1.0, std::abs(scale)));
}

}  // namespace

TEST_CASE("scalar kernels: known values") {
  const auto& ops = kernels::scalar();
  const std::vector<double> a{0.25, 0.25, 0.5};
  const std::vector<double> b{0.5, 0.5, 0.0};

  CHECK(ops.sum(a.data(), a.size()) == doctest::Approx(1.0).epsilon(1e-15));
  // dot_sqrt: sqrt(0.125) * 2 + 0
  CHECK(ops.dot_sqrt(a.data(), b.data(), 3) ==
        doctest::Approx(2.0 * std::sqrt(0.125)).epsilon(1e-15));
  // half_abs_diff: 0.5 * (0.25 + 0.25 + 0.5)
  CHECK(ops.half_abs_diff(a.data(), b.data(), 3) == doctest::Approx(0.5));
  // sym_chi_sq: two (0.25)^2/0.75 terms + 0.5^2/0.5
  CHECK(ops.sym_chi_sq(a.data(), b.data(), 3) ==
        doctest::Approx(2.0 * 0.0625 / 0.75 + 0.5).epsilon(1e-15));
}

TEST_CASE("sym_chi_sq: both-zero atoms contribute zero") {
  const auto& ops = kernels::scalar();
  const std::vector<double> a{0.0, 0.5, 0.5};
  const std::vector<double> b{0.0, 0.5, 0.5};
  CHECK(ops.sym_chi_sq(a.data(), b.data(), 3) == 0.0);

  const std::vector<double> c{0.0, 1.0, 0.0};
  const std::vector<double> d{0.0, 0.0, 1.0};
  // disjoint supports telescope to sum(c) + sum(d)
  CHECK(ops.sym_chi_sq(c.data(), d.data(), 3) == doctest::Approx(2.0));
}

TEST_CASE("avx2 kernels match scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available on this machine; dispatch falls back to scalar");
    return;
  }
  const auto& sc = kernels::scalar();
  const auto& vec = kernels::avx2();

  for (const std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3},
                              std::size_t{4}, std::size_t{5}, std::size_t{17},
                              std::size_t{256}, std::size_t{1003}}) {
    const auto a = random_values(n, 0xA0 + n, 0.2);
    const auto b = random_values(n, 0xB0 + n, 0.2);

    check_close(vec.sum(a.data(), n), sc.sum(a.data(), n), sc.sum(a.data(), n));
    check_close(vec.dot_sqrt(a.data(), b.data(), n),
                sc.dot_sqrt(a.data(), b.data(), n), 1.0);
    check_close(vec.half_sq_diff_sqrt(a.data(), b.data(), n),
                sc.half_sq_diff_sqrt(a.data(), b.data(), n), 1.0);
    check_close(vec.half_abs_diff(a.data(), b.data(), n),
                sc.half_abs_diff(a.data(), b.data(), n), 1.0);
    check_close(vec.sym_chi_sq(a.data(), b.data(), n),
                sc.sym_chi_sq(a.data(), b.data(), n), 1.0);
    check_close(vec.weighted_sum(a.data(), b.data(), n),
                sc.weighted_sum(a.data(), b.data(), n), 1.0);
  }
}

TEST_CASE("avx2 gather_sum matches scalar") {
  if (!kernels::avx2_available()) return;
  const auto& sc = kernels::scalar();
  const auto& vec = kernels::avx2();

  const std::size_t table_size = 97;
  const auto table = random_values(table_size, 0xC0, 0.1);
  SplitMix64 rng(0xC1);
  for (const std::size_t n :
       {std::size_t{0}, std::size_t{1}, std::size_t{7}, std::size_t{512}}) {
    std::vector<std::uint32_t> idx(n);
    for (auto& i : idx) {
      i = static_cast<std::uint32_t>(rng.next_below(table_size));
    }
    check_close(vec.gather_sum(table.data(), idx.data(), n),
                sc.gather_sum(table.data(), idx.data(), n), 1.0);
  }
}

TEST_CASE("avx2 geodesic_combine is bit-identical to scalar") {
  if (!kernels::avx2_available()) return;
  const auto& sc = kernels::scalar();
  const auto& vec = kernels::avx2();

  const std::size_t n = 131;
  const auto a = random_values(n, 0xD0, 0.15);
  const auto b = random_values(n, 0xD1, 0.15);
  std::vector<double> out_sc(n), out_vec(n);
  const double c1 = 0.731, c2 = 0.445;
  sc.geodesic_combine(a.data(), b.data(), c1, c2, out_sc.data(), n);
  vec.geodesic_combine(a.data(), b.data(), c1, c2, out_vec.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(out_sc[i] == out_vec[i]);  // same mul/add sequence, no FMA
  }
}

TEST_CASE("dispatch table resolves") {
  const auto& ops = kernels::active();
  const std::vector<double> a{0.5, 0.5};
  CHECK(ops.sum(a.data(), 2) == 1.0);
  if (kernels::avx2_available()) {
    CHECK(std::string(ops.name) == "avx2");
  } else {
    CHECK(std::string(ops.name) == "scalar");
  }
}
