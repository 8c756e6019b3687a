#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nloc {

namespace detail {
inline std::atomic<int>& thread_count_slot() {
  static std::atomic<int> n{1};
  return n;
}
}  // namespace detail

// Worker count used by parallel_for; 0 selects hardware concurrency.
inline void set_thread_count(int n) {
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  detail::thread_count_slot() = n;
}
inline int thread_count() { return detail::thread_count_slot(); }

// Runs body(i) for i in [0, n). Iterations must be independent; results do
// not depend on the worker count.
template <class Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
  const int workers = static_cast<int>(std::min<std::ptrdiff_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::ptrdiff_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    try {
      for (std::ptrdiff_t i; (i = next.fetch_add(1)) < n;) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nloc
