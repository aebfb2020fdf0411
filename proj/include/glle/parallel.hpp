#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace glle {

/// Runs fn(i) for i in [0, n) on up to `threads` workers using contiguous
/// blocks. fn must only write to slots owned by i. If any call throws, the
/// exception from the smallest failing index is rethrown.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, int threads, Fn&& fn) {
  if (n <= 0) return;
  const std::ptrdiff_t workers = std::clamp<std::ptrdiff_t>(threads, 1, n);
  if (workers == 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first_error;
  std::ptrdiff_t first_index = n;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::ptrdiff_t block = (n + workers - 1) / workers;
  for (std::ptrdiff_t w = 0; w < workers; ++w) {
    const std::ptrdiff_t lo = w * block;
    const std::ptrdiff_t hi = std::min(n, lo + block);
    pool.emplace_back([&, lo, hi] {
      for (std::ptrdiff_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < first_index) {
            first_index = i;
            first_error = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace glle
