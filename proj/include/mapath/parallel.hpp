#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mapath {

/// Worker count used by data-parallel point loops. 1 (the default) runs
/// everything on the calling thread. Only map-style loops are parallelized;
/// reductions stay sequential, so results are identical for any setting.
inline int& thread_count() {
  static int count = 1;
  return count;
}

/// Chunked parallel loop over [0, total). fn(begin, end) must only write to
/// disjoint output ranges.
template <class Fn>
inline void parallel_for(std::size_t total, Fn&& fn) {
  const int k = std::max(1, thread_count());
  if (k == 1 || total < 2048) {
    fn(std::size_t{0}, total);
    return;
  }
  const std::size_t chunk = (total + k - 1) / k;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(k) - 1);
  std::size_t begin = chunk;
  for (int i = 1; i < k && begin < total; ++i, begin += chunk) {
    pool.emplace_back([&fn, begin, end = std::min(begin + chunk, total)] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(chunk, total));
  for (auto& th : pool) th.join();
}

}  // namespace mapath
