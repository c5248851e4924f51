#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lmbreak::detail {

/// Runs body(i) for i in [0, count) on up to `workers` threads using static
/// contiguous chunks. Results must be written to per-index slots; the first
/// exception thrown by any worker is rethrown after all threads join.
template <typename Body>
void parallel_for(std::int64_t count, int workers, Body&& body) {
  if (count <= 0) return;
  const std::int64_t threads = std::clamp<std::int64_t>(workers, 1, count);
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (std::int64_t w = 0; w < threads; ++w) {
    const std::int64_t begin = count * w / threads;
    const std::int64_t end = count * (w + 1) / threads;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::int64_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace lmbreak::detail
