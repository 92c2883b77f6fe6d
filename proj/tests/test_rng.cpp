#include "rfcast/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>

using rfcast::CounterRng;

TEST(Bootstrap, SingleObservation) {
    CounterRng rng(5);
    EXPECT_EQ(rfcast::bootstrap_sample(rng, 1), (std::vector<std::size_t>{0}));
}

TEST(Bootstrap, DeterministicPerStream) {
    auto a = CounterRng::derive(99, 3);
    auto b = CounterRng::derive(99, 3);
    EXPECT_EQ(rfcast::bootstrap_sample(a, 50), rfcast::bootstrap_sample(b, 50));
    auto c = CounterRng::derive(99, 4);
    auto d = CounterRng::derive(99, 3);
    EXPECT_NE(rfcast::bootstrap_sample(c, 50), rfcast::bootstrap_sample(d, 50));
}

TEST(Bootstrap, UniformWithinFivePercent) {
    // 10,000 draws over n = 10: each index expected 1000 times; the +-5% band
    // is about 3.3 standard deviations of a Binomial(10000, 0.1) count.
    auto rng = CounterRng::derive(2024, 0);
    std::array<int, 10> counts{};
    for (int rep = 0; rep < 1000; ++rep) {
        for (auto i : rfcast::bootstrap_sample(rng, 10)) {
            ++counts[i];
        }
    }
    for (int c : counts) {
        EXPECT_GE(c, 950);
        EXPECT_LE(c, 1050);
    }
}

TEST(CounterRng, BelowStaysInRange) {
    CounterRng rng(1);
    for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 7ULL, 1000ULL, (1ULL << 63) + 5}) {
        for (int i = 0; i < 200; ++i) {
            EXPECT_LT(rng.below(bound), bound);
        }
    }
}

TEST(CounterRng, SampleWithoutReplacementIsSortedAndDistinct) {
    CounterRng rng(77);
    std::vector<std::size_t> scratch;
    std::vector<std::size_t> out;
    for (int i = 0; i < 500; ++i) {
        rfcast::sample_without_replacement(rng, 16, 5, scratch, out);
        ASSERT_EQ(out.size(), 5U);
        EXPECT_TRUE(std::is_sorted(out.begin(), out.end()));
        EXPECT_EQ(std::adjacent_find(out.begin(), out.end()), out.end());
        EXPECT_LT(out.back(), 16U);
    }
}

TEST(CounterRng, NormalMoments) {
    CounterRng rng(3);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}
