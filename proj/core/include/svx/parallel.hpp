#pragma once

#include <cstddef>
#include <functional>

namespace svx {

/// Worker count used by parallel loops. Defaults to the SVX_THREADS
/// environment variable when set, otherwise the hardware concurrency.
int thread_count();

/// Overrides the worker count for the lifetime of the object (process-wide).
class ScopedThreadCount {
public:
    explicit ScopedThreadCount(int n);
    ~ScopedThreadCount();
    ScopedThreadCount(const ScopedThreadCount&) = delete;
    ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

private:
    int previous_;
};

/// Calls `body(begin, end)` over contiguous chunks of [0, n). Chunks are
/// disjoint, so bodies that only write to their own index range produce
/// identical results for any worker count. A call made from inside a worker
/// runs serially on that worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace svx
