#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hrt::detail {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HRT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_chunks(std::int64_t n, int threads,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
  const int t = static_cast<int>(
      std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
  if (t == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(t));
  for (int c = 0; c < t; ++c) {
    const std::int64_t begin = n * c / t;
    const std::int64_t end = n * (c + 1) / t;
    workers.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
  }
  for (auto& w : workers) w.join();
}

double wilson_halfwidth(double rate, std::int64_t n) {
  if (n <= 0) return 1.0;
  constexpr double z = 1.959963984540054;  // 97.5th normal quantile
  const double nd = static_cast<double>(n);
  const double z2 = z * z;
  return z * std::sqrt(rate * (1.0 - rate) / nd + z2 / (4.0 * nd * nd)) /
         (1.0 + z2 / nd);
}

}  // namespace hrt::detail
