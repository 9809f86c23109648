#include "svx/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace svx {
namespace {

std::atomic<int> g_override{0};
// nested calls from a worker run inline instead of spawning another pool
thread_local bool t_in_worker = false;

int env_threads() {
    if (const char* env = std::getenv("SVX_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return 0;
}

}  // namespace

int thread_count() {
    if (int n = g_override.load(); n > 0) return n;
    if (int n = env_threads(); n > 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

ScopedThreadCount::ScopedThreadCount(int n) : previous_(g_override.exchange(std::max(1, n))) {}

ScopedThreadCount::~ScopedThreadCount() { g_override.store(previous_); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1 || t_in_worker) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            t_in_worker = true;
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace svx
