#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace folab {

/// Worker count: explicit request, else FOLIATION_LAB_THREADS, else hardware.
std::size_t default_thread_count(std::size_t requested = 0);

/// Run f(i) for i in [0, n). Results must be written to per-index slots;
/// scheduling order is unspecified, outputs are deterministic by index.
/// The first exception thrown by any task is rethrown after all workers join.
template <class F>
void parallel_for(std::size_t n, F&& f, std::size_t threads = 0) {
    threads = default_thread_count(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    if (threads > n) threads = n;
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace folab
