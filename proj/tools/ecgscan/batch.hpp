#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ecgscan::cli {

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). Results land by index, so output order never depends on
/// scheduling. fn must not throw.
template <typename Result>
std::vector<Result> run_batch(std::size_t n, int workers,
                              const std::function<Result(std::size_t)>& fn) {
  std::vector<Result> results(n);
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) results[i] = fn(i);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace ecgscan::cli
