#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace interbank {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Splits [0, n) into contiguous chunks and calls fn(worker, begin, end) for each
/// one on its own thread. If several chunks throw, the exception from the chunk
/// with the lowest start index is rethrown, so failures do not depend on timing.
template <typename Fn>
void parallel_chunks(std::int64_t n, int workers, Fn&& fn) {
  workers = static_cast<int>(std::clamp<std::int64_t>(resolve_workers(workers), 1, std::max<std::int64_t>(n, 1)));
  if (workers == 1) {
    fn(0, std::int64_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = n * w / workers;
    const std::int64_t end = n * (w + 1) / workers;
    threads.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace interbank
