#ifndef ANISOFRAME_PARALLEL_HPP
#define ANISOFRAME_PARALLEL_HPP

#include <functional>
#include <thread>
#include <vector>

namespace anisoframe {

// Chunked index loop over [begin, end). Worker writes must go to disjoint
// slots; results are then independent of the thread count, which keeps the
// determinism contract.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int)>& fn) {
  if (end <= begin) return;
  if (threads <= 1 || end - begin == 1) {
    for (int k = begin; k < end; ++k) fn(k);
    return;
  }
  const int n = end - begin;
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=, &fn] {
      for (int k = begin + w; k < end; k += workers) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace anisoframe

#endif
