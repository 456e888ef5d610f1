#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace credence {

// Runs fn(0), ..., fn(count-1). With parallelism > 1 the indices are pulled
// by a pool of that many threads, so fn must be thread-safe; the first
// exception is rethrown after all workers drain. With parallelism <= 1 the
// calls run serially in index order (the mode mock backends require, since
// their per-stage response sequencing is order-sensitive).
template <typename Fn>
void parallel_for_index(std::size_t count, int parallelism, Fn&& fn) {
    if (parallelism <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    const std::size_t workers =
        std::min(static_cast<std::size_t>(parallelism), count);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace credence
