#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace flowcast {

/// Runs fn(i) for i in [0, n). With threads <= 1 this is a plain loop; otherwise
/// indices are split into contiguous chunks, one worker per chunk. Tasks must
/// write to disjoint state; no reduction is performed here.
inline void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const size_t workers = std::min<size_t>(static_cast<size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            // contiguous block per worker
            const size_t lo = n * w / workers;
            const size_t hi = n * (w + 1) / workers;
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Hardware thread count with a sane fallback; 0 or negative requests resolve here.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace flowcast
