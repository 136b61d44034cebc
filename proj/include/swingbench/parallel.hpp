#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace swingbench {

/// Worker count for a batch of independent jobs; requested <= 0 means auto
/// (hardware concurrency).
inline int resolve_thread_count(int requested, std::size_t jobs) {
  int n = requested;
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  const std::size_t cap = std::max<std::size_t>(jobs, 1);
  return static_cast<int>(std::min< std::size_t>(static_cast<std::size_t>(n), cap));
}

/// Run fn(i) for i in [0, count). Each index is claimed exactly once and the
/// callable writes only its own slot, so results are identical for any
/// worker count. The first exception is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, int max_threads, Fn&& fn) {
  const int workers = resolve_thread_count(max_threads, count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace swingbench
