#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lipdev {

/// Worker count used by every parallel kernel. Results never depend on it:
/// kernels only write disjoint outputs or combine with max / OR.
void set_thread_count(int threads);
int thread_count();

/// Calls fn(i) for i in [0, n). Indices are split into contiguous chunks,
/// one per worker. The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, thread_count())), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Sum with a fixed pairwise tree over the index range, so the rounding
/// pattern depends only on n.
template <class Getter>
double pairwise_sum(std::size_t lo, std::size_t hi, const Getter& get) {
  const std::size_t len = hi - lo;
  if (len == 0) return 0.0;
  if (len <= 8) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += get(i);
    return acc;
  }
  const std::size_t mid = lo + len / 2;
  return pairwise_sum(lo, mid, get) + pairwise_sum(mid, hi, get);
}

}  // namespace lipdev
