#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dtilink {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(begin, end) over disjoint contiguous chunks of [0, n).
/// Deterministic as long as fn writes only to slots inside its chunk.
/// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_chunks(size_t n, int threads, Fn&& fn) {
    size_t workers = static_cast<size_t>(resolve_threads(threads));
    if (workers > n) workers = n;
    if (n == 0) return;
    if (workers <= 1) {
        fn(size_t{0}, n);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    size_t base = n / workers;
    size_t rem = n % workers;
    size_t start = 0;
    for (size_t i = 0; i < workers; ++i) {
        size_t len = base + (i < rem ? 1 : 0);
        pool.emplace_back([&fn, &failure, &failure_mutex, start, len] {
            try {
                fn(start, start + len);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
        start += len;
    }
    for (auto& worker : pool) worker.join();
    if (failure) std::rethrow_exception(failure);
}

/// Work-stealing loop over n independent tasks. Task outputs must go to
/// per-task slots; completion order is unspecified but results are not.
template <typename Fn>
void parallel_tasks(size_t n, int threads, Fn&& fn) {
    size_t workers = static_cast<size_t>(resolve_threads(threads));
    if (workers > n) workers = n;
    if (n == 0) return;
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& worker : pool) worker.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dtilink
