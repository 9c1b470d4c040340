#pragma once

#include <functional>

namespace refmap {

/// Thread cap used by all parallel loops. Defaults to the REFMAP_THREADS
/// environment variable if set, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Indices are handed out in small chunks;
/// each index is processed exactly once, so results written to disjoint
/// slots are independent of the thread count. body(worker, i) receives the
/// worker slot in [0, thread_count()) for per-thread scratch space.
/// Calls from inside a running parallel_for execute serially.
void parallel_for(int n, const std::function<void(int worker, int i)>& body);

}  // namespace refmap
