#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace fdxlab {

namespace detail {
inline std::atomic<unsigned>& thread_override() {
    static std::atomic<unsigned> n{0};
    return n;
}
} // namespace detail

/// Worker count: set_thread_count() if called, else FDXLAB_THREADS, else the
/// hardware concurrency.
inline unsigned thread_count() {
    if (const unsigned n = detail::thread_override().load(); n > 0) return n;
    if (const char* env = std::getenv("FDXLAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// 0 restores the default lookup.
inline void set_thread_count(unsigned n) { detail::thread_override().store(n); }

/// Calls fn(i) for i in [0, n) over contiguous chunks. fn must only write to
/// slots it owns; results are therefore independent of the thread count.
/// The first exception (lowest chunk) is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t end = std::min(n, (w + 1) * chunk);
                for (std::size_t i = w * chunk; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace fdxlab
