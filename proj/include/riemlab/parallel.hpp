#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace riemlab {

/// Number of workers for a requested count; 0 means hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [0, count). Each call must write only to its own
/// slot. If any calls throw, the exception of the lowest index is rethrown, so
/// failures are reported identically for every thread count.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)),
                                                             std::max<std::size_t>(count, 1)));
  std::size_t failed_index = count;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto record = [&](std::size_t i, std::exception_ptr e) {
    std::lock_guard lock(failure_mutex);
    if (i < failed_index) {
      failed_index = i;
      failure = e;
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        record(i, std::current_exception());
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          record(i, std::current_exception());
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace riemlab
