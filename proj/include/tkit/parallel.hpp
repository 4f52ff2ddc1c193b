#pragma once

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <thread>
#include <vector>

namespace tkit {

// Worker count: hardware concurrency capped by the TKIT_THREADS env var.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("TKIT_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

// Chunked parallel loop over [0, count). fn(begin, end) handles one chunk.
// Chunk boundaries depend only on count, so per-index results are
// deterministic regardless of thread count; reductions must be done by the
// caller in fixed index order.
template <typename Fn>
void parallel_chunks(std::size_t count, Fn&& fn) {
    int workers = worker_count();
    if (count == 0) return;
    if (workers <= 1 || count < 1024) {
        fn(static_cast<std::size_t>(0), count);
        return;
    }
    std::size_t nchunks = static_cast<std::size_t>(workers);
    std::size_t chunk = (count + nchunks - 1) / nchunks;
    std::vector<std::thread> pool;
    for (std::size_t c = 0; c < nchunks; ++c) {
        std::size_t b = c * chunk;
        std::size_t e = std::min(count, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tkit
