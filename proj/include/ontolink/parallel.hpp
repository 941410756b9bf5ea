#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ontolink {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(i, worker) for every i in [begin, end). Indices are handed out in
// chunks; callers must make per-index work independent of the worker that
// runs it if they want thread-count-independent results.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn,
                  std::size_t chunk = 16) {
  if (begin >= end) return;
  const std::size_t n = end - begin;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), (n + chunk - 1) / chunk));
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i, 0u);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](unsigned worker) {
    try {
      for (;;) {
        const std::size_t start = next.fetch_add(chunk);
        if (start >= end) break;
        const std::size_t stop = std::min(end, start + chunk);
        for (std::size_t i = start; i < stop; ++i) fn(i, worker);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(end);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body, w);
  body(0);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ontolink
