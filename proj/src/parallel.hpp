#pragma once

#include <cstdint>
#include <functional>

namespace hrt::detail {

// requested <= 0 resolves through HRT_THREADS, then hardware concurrency.
int resolve_threads(int requested);

// Splits [0, n) into one contiguous chunk per thread and joins them all.
// fn(chunk_index, begin, end) must only write chunk-local state; callers
// merge per-chunk results in chunk order afterwards.
void parallel_chunks(std::int64_t n, int threads,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn);

// Wilson score interval halfwidth at 95% for an empirical rate.
double wilson_halfwidth(double rate, std::int64_t n);

}  // namespace hrt::detail
