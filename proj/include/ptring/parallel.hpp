#ifndef PTRING_PARALLEL_HPP
#define PTRING_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ptring
{

inline unsigned default_thread_count()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Evaluates fn(0..n-1) on a small worker pool and returns the results in index
// order. fn must not share mutable state between calls. The first exception
// thrown by any call is rethrown after all workers have joined.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn, unsigned threads = 0) -> std::vector<decltype(fn(std::size_t{}))>
{
    using Result = decltype(fn(std::size_t{}));
    std::vector<Result> out(n);
    if (threads == 0)
        threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

    if (threads <= 1) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] = fn(k);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n || failed.load())
                return;
            try {
                out[k] = fn(k);
            } catch (...) {
                if (!failed.exchange(true))
                    failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace ptring

#endif // PTRING_PARALLEL_HPP
