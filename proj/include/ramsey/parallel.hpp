#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ramsey
{
    // Number of worker threads: an explicit positive request wins, then the
    // RAMSEY_THREADS environment variable, then 1. Zero means every hardware
    // thread.
    inline auto resolve_threads(int requested = -1) -> int
    {
        if (requested < 0) {
            if (auto env = std::getenv("RAMSEY_THREADS"))
                requested = std::atoi(env);
            else
                requested = 1;
        }
        if (requested == 0)
            requested = int(std::max(1u, std::thread::hardware_concurrency()));
        return std::max(1, requested);
    }

    // Runs body(i) for i in [0, count) on up to `threads` workers. Each call
    // must write only its own slot; callers merge slots in index order, so
    // results do not depend on scheduling. The exception of the smallest
    // failing index is rethrown after all workers finish.
    inline auto parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> & body) -> void
    {
        threads = int(std::min<std::size_t>(std::max(1, threads), std::max<std::size_t>(1, count)));
        if (threads <= 1) {
            for (std::size_t i = 0; i < count; ++i)
                body(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(count);
        auto work = [&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    body(i);
                }
                catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work);
        for (auto & t : pool)
            t.join();
        for (auto & e : errors)
            if (e)
                std::rethrow_exception(e);
    }
}
