#pragma once

// Deterministic parallel map over an index range: contiguous blocks, one
// per worker, no shared mutable state. Results are identical to the
// sequential order because each index writes only its own slot.

#include <thread>
#include <vector>

namespace aggdiff {

template <class F>
inline void parallel_for(int begin, int end, const F& body) {
    const int count = end - begin;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw < 2 || count < 64) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    const int workers = static_cast<int>(std::min<unsigned>(hw, 8));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + w * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace aggdiff
