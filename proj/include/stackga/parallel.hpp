#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stackga {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{1};
  return cap;
}
inline thread_local bool inside_parallel_region = false;
}  // namespace detail

inline void set_max_threads(int n) { detail::thread_cap() = n < 1 ? 1 : n; }
inline int max_threads() { return detail::thread_cap().load(); }

// Runs fn(i) for i in [0, n). Workers write to disjoint, preallocated slots;
// callers do any reduction afterwards in index order, so results never depend
// on scheduling. Nested calls degrade to serial.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int cap = max_threads();
  if (n == 0) return;
  if (cap <= 1 || n == 1 || detail::inside_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(cap), n);
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::inside_parallel_region = true;
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stackga
