#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qsurr {

/// Worker count for a --jobs style argument; 0 means all available cores.
inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls fn(begin, end) on disjoint chunks of [0, n) from at most `jobs`
/// threads and blocks until all finish. Chunking is contiguous, so callers
/// that write to disjoint per-index slots need no synchronization. The
/// first exception thrown by a worker is rethrown here.
template <typename Fn>
void parallel_for(std::int64_t n, int jobs, Fn&& fn) {
  if (n <= 0) return;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(resolve_jobs(jobs), n));
  if (workers <= 1) {
    fn(std::int64_t{0}, n);
    return;
  }
  std::mutex mu;
  std::exception_ptr first_error;
  const std::int64_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = std::int64_t(w) * chunk;
    const std::int64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qsurr
