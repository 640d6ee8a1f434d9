#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace e7forge {

/// Worker count: min(E7FORGE_THREADS if set, hardware concurrency), at least 1.
inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("E7FORGE_THREADS")) {
    long v = std::atol(env);
    if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
  }
  return hw;
}

/// Run fn(begin, end) over a partition of [0, n). Results must be merged by
/// the caller in index order so output stays deterministic.
template <class Fn>
inline void parallel_chunks(std::size_t n, Fn&& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || n < 2048) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace e7forge
