#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace rbfk {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static contiguous partition of [0, n). Chunks touch disjoint index
// ranges and there are no cross-thread reductions, so results are
// bitwise identical for any thread count.
template <class Body>
void parallel_for(long n, int threads, Body&& body) {
    long workers = std::min<long>(resolve_threads(threads), n);
    if (workers <= 1) {
        if (n > 0) body(0L, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    long chunk = (n + workers - 1) / workers;
    for (long t = 0; t < workers; ++t) {
        long first = t * chunk;
        long last = std::min(n, first + chunk);
        if (first >= last) break;
        pool.emplace_back([&body, first, last] { body(first, last); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace rbfk
