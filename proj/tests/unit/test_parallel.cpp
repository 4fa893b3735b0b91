#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hestonlab/parallel.hpp"

using namespace hestonlab;

namespace {

struct ThreadGuard {
    explicit ThreadGuard(unsigned n) { set_thread_count(n); }
    ~ThreadGuard() { set_thread_count(0); }
};

}  // namespace

TEST(Parallel, VisitsEveryIndexOnce) {
    for (unsigned threads : {1u, 2u, 5u}) {
        ThreadGuard g(threads);
        std::vector<int> hits(1003, 0);
        parallel_for(static_cast<std::int64_t>(hits.size()), [&](std::int64_t i) { ++hits[static_cast<std::size_t>(i)]; });
        for (int h : hits) ASSERT_EQ(h, 1);
    }
}

TEST(Parallel, PropagatesExceptions) {
    ThreadGuard g(3);
    EXPECT_THROW(parallel_for(100,
                              [](std::int64_t i) {
                                  if (i == 77) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}

TEST(Parallel, ThreadCountOverrideWins) {
    set_thread_count(4);
    EXPECT_EQ(thread_count(), 4u);
    set_thread_count(0);
    EXPECT_GE(thread_count(), 1u);
}

TEST(PairwiseSum, MatchesExactSumsAndIsOrderFixed) {
    std::vector<double> xs(1000);
    std::iota(xs.begin(), xs.end(), 1.0);
    EXPECT_EQ(pairwise_sum(xs), 500500.0);
    EXPECT_EQ(pairwise_sum(std::span<const double>{}), 0.0);
    std::vector<double> tiny(1 << 20, 0.1);
    EXPECT_NEAR(pairwise_sum(tiny), 0.1 * (1 << 20), 1e-6);
}

TEST(SampleStats, MeanStdAndError) {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    const auto st = sample_stats(xs);
    EXPECT_DOUBLE_EQ(st.mean, 3.0);
    EXPECT_NEAR(st.std_dev, std::sqrt(2.5), 1e-15);
    EXPECT_NEAR(st.std_error, std::sqrt(2.5 / 5), 1e-15);
}
