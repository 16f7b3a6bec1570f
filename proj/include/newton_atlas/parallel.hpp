#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <utility>
#include <vector>

namespace newton_atlas {

/// Number of workers to use when the caller asks for 0 ("auto").
inline unsigned resolve_workers(unsigned requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Calls fn(order[i]) for every i. Work is claimed dynamically, so results
/// must be written to per-index slots; the caller merges them afterwards.
/// The first exception thrown by any task is rethrown on the calling thread.
template <typename Fn>
void parallel_for_each_index(std::span<const std::size_t> order, unsigned workers, Fn&& fn) {
  const unsigned n_workers =
      std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::max<std::size_t>(order.size(), 1)));
  if (n_workers <= 1) {
    for (const std::size_t i : order) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1, std::memory_order_relaxed);
      if (slot >= order.size()) return;
      try {
        fn(order[slot]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(order.size());
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

/// Identity order 0..n-1.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  parallel_for_each_index(std::span<const std::size_t>(order), workers, std::forward<Fn>(fn));
}

}  // namespace newton_atlas
