#ifndef POLYDYN_PARALLEL_HPP
#define POLYDYN_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace polydyn {

/// Thread count used when a caller passes 0. POLYDYN_THREADS overrides the
/// hardware concurrency.
inline int default_threads() {
    if (const char* env = std::getenv("POLYDYN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs body(begin, end) over contiguous blocks of [0, n). Each index is
/// handled by exactly one call, so writing results into per-index slots
/// gives output independent of the thread count. If blocks throw, the
/// exception of the lowest-indexed failing block is rethrown.
template <class Body>
void parallel_blocks(std::size_t n, int threads, Body&& body) {
    if (threads <= 0) threads = default_threads();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}

template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    parallel_blocks(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

} // namespace polydyn

#endif // POLYDYN_PARALLEL_HPP
