#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace noiselab {

// Index-parallel loop. Each unit writes only its own slot, so results are identical
// for any worker count; reductions happen afterwards in index order.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto drain = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int k = std::min(workers, n);
  pool.reserve(k - 1);
  for (int w = 1; w < k; ++w) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
}

}  // namespace noiselab
