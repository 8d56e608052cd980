#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fna {

inline int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [begin, end) across worker threads. Work items must be
// independent; callers that need reproducible aggregates should write into
// pre-sized slots indexed by i and reduce in index order afterwards.
inline void parallel_for(int begin, int end,
                         const std::function<void(int)>& fn,
                         int threads = 0) {
  const int total = end - begin;
  if (total <= 0) return;
  const int nthreads = std::min(effective_threads(threads), total);
  if (nthreads <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }

  std::atomic<int> next(begin);
  std::exception_ptr error;
  std::atomic<bool> failed(false);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= end || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fna
