#ifndef SMNOMA_PARALLEL_HPP
#define SMNOMA_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace smnoma {

/// Worker count: SMNOMA_WORKERS if set, else hardware concurrency.
inline int default_worker_count() {
  if (const char* env = std::getenv("SMNOMA_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, n). Work items must be independent and write only
/// to their own slot; results are then identical for any worker count.
inline void parallel_for(int n, const std::function<void(int)>& fn,
                         int workers = 0) {
  if (workers <= 0) workers = default_worker_count();
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = std::min(workers, n);
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

}  // namespace smnoma

#endif  // SMNOMA_PARALLEL_HPP
