// SPDX-License-Identifier: Apache-2.0
#include "patchforge/parallel.hpp"

#include <cstdlib>
#include <algorithm>

namespace pf {

ThreadPool::ThreadPool(int threads) {
  const int extra = std::max(0, threads - 1);
  tasks_.resize(extra);
  workers_.reserve(extra);
  for (int i = 0; i < extra; ++i)
    workers_.emplace_back([this, i] { worker_loop(i); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
    ++generation_;
  }
  cv_start_.notify_all();
  for (std::thread& t : workers_) t.join();
}

void ThreadPool::worker_loop(int index) {
  uint64_t seen = 0;
  for (;;) {
    Task task;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_start_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      task = tasks_[index];
    }
    if (task.fn && task.begin < task.end) (*task.fn)(task.begin, task.end);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --pending_;
    }
    cv_done_.notify_one();
  }
}

void ThreadPool::parallel_for(long begin, long end,
                              const std::function<void(long, long)>& fn) {
  const long n = end - begin;
  if (n <= 0) return;
  const int parts = size();
  if (parts == 1 || n == 1) {
    fn(begin, end);
    return;
  }
  const long chunk = (n + parts - 1) / parts;
  long my_begin = begin, my_end = std::min(end, begin + chunk);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    pending_ = static_cast<int>(workers_.size());
    for (size_t w = 0; w < workers_.size(); ++w) {
      const long b = std::min(end, begin + chunk * static_cast<long>(w + 1));
      const long e = std::min(end, b + chunk);
      tasks_[w] = {&fn, b, e};
    }
    ++generation_;
  }
  cv_start_.notify_all();
  fn(my_begin, my_end);
  std::unique_lock<std::mutex> lock(mutex_);
  cv_done_.wait(lock, [&] { return pending_ == 0; });
}

int ThreadPool::default_threads() {
  if (const char* env = std::getenv("PATCHFORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return std::min(n, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace pf
