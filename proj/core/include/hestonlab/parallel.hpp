#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace hestonlab {

/// Worker count: set_thread_count() override, else HESTON_LAB_THREADS, else
/// hardware concurrency. Always >= 1.
unsigned thread_count();

/// 0 clears the override.
void set_thread_count(unsigned n);

/// Runs fn(i) for i in [0, n) over contiguous chunks. Results must be written
/// to per-index slots; reductions happen afterwards in index order so output
/// does not depend on the worker count.
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
    if (n <= 0) return;
    const auto workers = static_cast<std::int64_t>(
        std::min<std::int64_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::int64_t lo = w * chunk;
                const std::int64_t hi = std::min(n, lo + chunk);
                for (std::int64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise summation in a fixed order.
double pairwise_sum(std::span<const double> xs);

struct SampleStats {
    double mean = 0.0;
    double std_dev = 0.0;    // sample standard deviation (n - 1)
    double std_error = 0.0;  // std_dev / sqrt(n)
};

SampleStats sample_stats(std::span<const double> xs);

}  // namespace hestonlab
