#pragma once

// Index-parallel loops over a fixed worker pool size. Results are written to
// per-index slots, so every reduction done by the caller is in index order and
// the output does not depend on the worker count.

#include <atomic>
#include <cstddef>
#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sl2lab {

inline constexpr const char* kWorkersEnv = "SL2LAB_WORKERS";

/// Worker count from SL2LAB_WORKERS, else the hardware concurrency (>= 1).
int worker_count();

namespace detail {
/// Set inside worker threads; nested loops then run inline.
inline thread_local bool in_parallel_region = false;
}  // namespace detail

/// Calls f(i) for i in [0, n). The exception thrown at the smallest index wins.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers =
      detail::in_parallel_region ? 1 : std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto run = [&] {
    const bool outer = detail::in_parallel_region;
    detail::in_parallel_region = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
    detail::in_parallel_region = outer;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace sl2lab
