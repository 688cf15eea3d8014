#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jetlag {

/// Run fn(k) for k in [0, count) on up to `jobs` threads. Work is handed out
/// by index, so results written per index do not depend on scheduling. The
/// first exception (lowest index) is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr err;
  std::size_t err_at = count;
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count || stop.load()) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard lock(mu);
        if (k < err_at) {
          err_at = k;
          err = std::current_exception();
        }
        stop.store(true);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace jetlag
