#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace etl {

using Complex = std::complex<double>;

/// Number of worker threads used by the block reductions. 0 selects
/// std::thread::hardware_concurrency().
void set_workers(std::size_t n);
std::size_t workers();

namespace detail {

// Blocks are a function of the item count only; never of the worker count.
constexpr std::uint64_t kMinBlock = 2048;
constexpr std::uint64_t kMaxBlocks = 512;

inline std::uint64_t block_size_for(std::uint64_t count) {
    return std::max(kMinBlock, (count + kMaxBlocks - 1) / kMaxBlocks);
}

// In-place pairwise tree over `n` slots of `width` accumulators each.
void tree_reduce(std::vector<Complex>& slots, std::size_t n, std::size_t width);

// Set inside worker threads; nested reductions then run inline.
bool& in_worker();

struct WorkerScope {
    WorkerScope() { in_worker() = true; }
    ~WorkerScope() { in_worker() = false; }
    WorkerScope(const WorkerScope&) = delete;
    WorkerScope& operator=(const WorkerScope&) = delete;
};

inline std::size_t thread_budget(std::size_t items) {
    return detail::in_worker() ? 1 : std::min(workers(), items);
}

}  // namespace detail

/**
 * Sums `fn` over the index range [0, count) into `width` complex accumulators.
 *
 * `fn(begin, end, acc)` must add the contribution of items [begin, end) into
 * `acc` (length `width`). The range is cut into fixed blocks whose partial
 * sums are combined by a fixed pairwise tree, so the result is bitwise
 * identical for every worker count.
 */
template <class Fn>
std::vector<Complex> block_reduce(std::uint64_t count, std::size_t width, Fn&& fn) {
    std::vector<Complex> out(width, Complex{});
    if (count == 0 || width == 0) return out;

    const std::uint64_t block = detail::block_size_for(count);
    const std::size_t nblocks = static_cast<std::size_t>((count + block - 1) / block);
    std::vector<Complex> slots(nblocks * width, Complex{});

    auto run_block = [&](std::size_t b) {
        const std::uint64_t begin = b * block;
        const std::uint64_t end = std::min(count, begin + block);
        fn(begin, end, std::span<Complex>(slots.data() + b * width, width));
    };

    const std::size_t nthreads = detail::thread_budget(nblocks);
    if (nthreads <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&] {
            detail::WorkerScope scope;
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= nblocks) return;
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(nblocks);
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }

    detail::tree_reduce(slots, nblocks, width);
    std::copy(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(width), out.begin());
    return out;
}

/// Ordered parallel map over [0, n): out[i] = fn(i). Order of results is fixed.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
    std::vector<T> out(n);
    const std::size_t nthreads = detail::thread_budget(n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        detail::WorkerScope scope;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace etl
