// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ars::detail {

// Worker count for data-parallel loops, capped by ARS_TRACE_THREADS.
inline unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ARS_TRACE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

// Runs fn(0..n-1) on the given number of workers. Each index writes only its
// own outputs, so the result is identical regardless of the thread count or
// completion order.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         std::size_t workers)
{
    const std::size_t nthreads = std::min(workers, n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                fn(i);
        });
    for (auto& th : pool)
        th.join();
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    parallel_for(n, fn, worker_count());
}

} // namespace ars::detail
