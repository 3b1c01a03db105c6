#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rgr {

// Resolve a worker count: n > 0 as given; 0 = RGR_THREADS env var if set,
// else hardware concurrency.
inline int resolve_threads(int n) {
    if (n > 0) return n;
    if (const char* env = std::getenv("RGR_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static block partition of [0, count); results must be written by index so
// the output is independent of the worker count.
inline void parallel_for(int count, int threads, const std::function<void(int, int)>& chunk) {
    threads = std::min(resolve_threads(threads), std::max(count, 1));
    if (threads <= 1 || count <= 1) {
        chunk(0, count);
        return;
    }
    std::vector<std::thread> pool;
    const int per = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * per, hi = std::min(count, lo + per);
        if (lo >= hi) break;
        pool.emplace_back(chunk, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}  // namespace rgr
