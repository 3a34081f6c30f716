#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sparseatt {

/// Worker count from the SPARSEATT_THREADS environment variable, clamped to
/// [1, 64]. Defaults to 1; all row-parallel paths are written so the result
/// is identical for any value.
std::size_t configured_thread_count();

/// Runs fn(begin, end) over a partition of [0, count) using up to
/// configured_thread_count() threads. fn must only touch state owned by its
/// range. With one thread this is a plain call. The first exception thrown
/// by any worker is rethrown on the calling thread after the join.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  if (count == 0) return;
  std::size_t workers = std::min(configured_thread_count(), count);
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn, &first_error, &error_mutex] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sparseatt
