#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace chj {

/// Worker cap: CONTACT_HJ_THREADS when set, hardware concurrency otherwise.
inline int worker_count() {
  if (const char* env = std::getenv("CONTACT_HJ_THREADS")) {
    int k = std::atoi(env);
    if (k >= 1) return k;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Data-parallel loop over [0, n); falls back to the serial path for small
/// ranges or a single worker. fn must write disjoint outputs.
template <class F>
void parallel_for(int n, F&& fn, int grain = 1024) {
  int workers = worker_count();
  if (workers <= 1 || n < 2 * grain) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  int chunks = std::min(workers, (n + grain - 1) / grain);
  int per = (n + chunks - 1) / chunks;
  std::vector<std::future<void>> futs;
  futs.reserve(static_cast<size_t>(chunks));
  for (int k = 0; k < chunks; ++k) {
    int lo = k * per;
    int hi = std::min(n, lo + per);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    }));
  }
  for (auto& f : futs) f.get();
}

}  // namespace chj
