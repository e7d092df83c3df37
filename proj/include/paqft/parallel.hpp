#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace paqft {

// Thread count is taken from PAQFT_THREADS (0 or unset -> hardware default).
inline int thread_count() {
  if (const char* env = std::getenv("PAQFT_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// Static partition; every index writes only its own slot, so results are
// identical for any thread count.
inline void parallel_for(int n, const std::function<void(int)>& body) {
  int nthreads = std::min(thread_count(), n);
  if (nthreads <= 1 || n < 4) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([=, &body] {
      for (int i = t; i < n; i += nthreads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace paqft
