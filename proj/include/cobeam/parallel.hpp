#pragma once

// Minimal work-sharing loop. Callers keep results deterministic by writing
// into per-index slots and reducing them in index order afterwards.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cobeam {

/// Zero means one worker per hardware thread.
inline std::atomic<unsigned>& worker_override() {
    static std::atomic<unsigned> value{0};
    return value;
}

inline void set_worker_count(unsigned workers) { worker_override() = workers; }

inline unsigned worker_count() {
    if (const unsigned forced = worker_override().load(); forced > 0) return forced;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        try {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Trials are grouped into blocks of this size; block boundaries never
/// depend on the thread count.
inline constexpr std::size_t kTrialBlock = 1024;

}  // namespace cobeam
