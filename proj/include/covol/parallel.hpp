#pragma once

// Deterministic parallel map over replicate indices: results land in a
// preallocated slot per index, so the output is identical for any worker
// count or scheduling order.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace covol {

template <typename Fn>
std::vector<double> parallel_map(std::size_t count, std::size_t workers, Fn&& fn) {
  std::vector<double> out(count);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = std::max<std::size_t>(1, count / (workers * 32));
  auto body = [&]() {
    try {
      for (;;) {
        const std::size_t start = cursor.fetch_add(chunk);
        if (start >= count) return;
        const std::size_t stop = std::min(count, start + chunk);
        for (std::size_t i = start; i < stop; ++i) out[i] = fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace covol
