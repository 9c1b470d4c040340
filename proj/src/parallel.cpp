#include "refmap/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace refmap {

namespace {

int default_threads() {
  if (const char* env = std::getenv("REFMAP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int> g_threads{0};
thread_local bool t_in_parallel = false;

// Marks the current thread as a worker for the lifetime of the guard.
struct WorkerScope {
  bool previous = t_in_parallel;
  WorkerScope() { t_in_parallel = true; }
  ~WorkerScope() { t_in_parallel = previous; }
};

}  // namespace

int thread_count() {
  int n = g_threads.load();
  if (n <= 0) {
    n = default_threads();
    g_threads.store(n);
  }
  return n;
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

void parallel_for(int n, const std::function<void(int, int)>& body) {
  if (n <= 0) return;
  // nested loops run inline on the calling worker
  const int workers = t_in_parallel ? 1 : std::min(thread_count(), n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(0, i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](int worker) {
    WorkerScope scope;
    // small chunks; the per-index cost varies a lot across a sphere image
    constexpr int kChunk = 4;
    for (;;) {
      const int begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const int end = std::min(n, begin + kChunk);
      try {
        for (int i = begin; i < end; ++i) body(worker, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace refmap
