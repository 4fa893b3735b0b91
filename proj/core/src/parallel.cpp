#include "hestonlab/parallel.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

namespace hestonlab {

namespace {
std::atomic<unsigned> g_override{0};
}

unsigned thread_count() {
    if (unsigned o = g_override.load(); o > 0) return o;
    if (const char* env = std::getenv("HESTON_LAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(unsigned n) { g_override.store(n); }

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

SampleStats sample_stats(std::span<const double> xs) {
    SampleStats st;
    const auto n = xs.size();
    if (n == 0) return st;
    st.mean = pairwise_sum(xs) / static_cast<double>(n);
    if (n < 2) return st;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - st.mean;
        sq[i] = d * d;
    }
    st.std_dev = std::sqrt(pairwise_sum(sq) / static_cast<double>(n - 1));
    st.std_error = st.std_dev / std::sqrt(static_cast<double>(n));
    return st;
}

}  // namespace hestonlab
