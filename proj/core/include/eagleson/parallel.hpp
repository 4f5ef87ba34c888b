/*
   Copyright 2026 the eagleson authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#ifndef EAGLESON_PARALLEL_HPP
#define EAGLESON_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace eagleson {

/// Fixed block size for row partitioning. The partition depends only on the
/// problem size, never on the worker count, so every statistic computed from
/// per-row outputs is identical for any number of workers.
inline constexpr std::size_t kParallelBlock = 4096;

inline unsigned effective_workers(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs fn(begin, end) over [0, count) split into kParallelBlock-sized blocks.
/// Blocks are claimed from an atomic counter; each call must write only to
/// rows in [begin, end). Exceptions are captured and rethrown on the caller.
template <typename Fn>
void parallel_for_blocks(std::size_t count, unsigned workers, Fn&& fn) {
  const unsigned w = effective_workers(workers);
  const std::size_t nblocks = (count + kParallelBlock - 1) / kParallelBlock;
  if (w <= 1 || nblocks <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t begin = b * kParallelBlock;
      fn(begin, std::min(count, begin + kParallelBlock));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks) return;
      const std::size_t begin = b * kParallelBlock;
      try {
        fn(begin, std::min(count, begin + kParallelBlock));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(w);
  for (unsigned i = 0; i < w; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace eagleson

#endif  // EAGLESON_PARALLEL_HPP
