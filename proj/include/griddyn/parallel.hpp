#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

#include "griddyn/common.hpp"

namespace griddyn {

// Run fn over [0, n) split into contiguous [begin, end) ranges across workers.
// Callers guarantee the ranges touch disjoint state.
inline void parallel_ranges(u64 n, int threads, const std::function<void(u64, u64)>& fn) {
  if (threads <= 1 || n < 2) {
    fn(0, n);
    return;
  }
  u64 k = std::min<u64>((u64)threads, n);
  std::vector<std::thread> workers;
  u64 base = n / k, rem = n % k, at = 0;
  for (u64 w = 0; w < k; ++w) {
    u64 len = base + (w < rem ? 1 : 0);
    workers.emplace_back(fn, at, at + len);
    at += len;
  }
  for (std::thread& t : workers) t.join();
}

}  // namespace griddyn
