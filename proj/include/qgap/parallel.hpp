#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace qgap {

// Worker count: QGAP_THREADS if set (clamped to >= 1), else hardware_concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("QGAP_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

namespace detail {
inline bool& in_worker_flag() {
    thread_local bool flag = false;
    return flag;
}
}  // namespace detail

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker, so results keyed by i land in preallocated slots and reductions
// stay deterministic regardless of scheduling. Nested calls from inside a
// worker run serially instead of spawning again. If workers throw, the one
// from the lowest chunk is rethrown after all of them join.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1 || detail::in_worker_flag()) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errs(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, &err = errs[w]] {
            detail::in_worker_flag() = true;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                err = std::current_exception();
            }
            detail::in_worker_flag() = false;
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace qgap
