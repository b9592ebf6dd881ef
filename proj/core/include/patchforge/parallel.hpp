// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pf {

// Fork-join worker pool for slab-parallel field updates. parallel_for
// splits [begin, end) into one contiguous chunk per worker, so the
// partitioning — and any per-chunk reduction order — is a pure function of
// the thread count.
class ThreadPool {
 public:
  explicit ThreadPool(int threads);
  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  // fn(chunk_begin, chunk_end) runs on each chunk; blocks until all done.
  void parallel_for(long begin, long end,
                    const std::function<void(long, long)>& fn);

  // Thread budget: PATCHFORGE_THREADS when set, else hardware concurrency.
  static int default_threads();

 private:
  void worker_loop(int index);

  struct Task {
    const std::function<void(long, long)>* fn = nullptr;
    long begin = 0;
    long end = 0;
  };

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable cv_start_;
  std::condition_variable cv_done_;
  std::vector<Task> tasks_;
  uint64_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace pf
