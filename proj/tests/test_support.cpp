#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "polydyn/parallel.hpp"
#include "polydyn/summation.hpp"

using namespace polydyn;

TEST(Summation, CompensatedRecoversCancelledTerms) {
    CompensatedSum s;
    s += 1.0;
    s += 1e100;
    s += 1.0;
    s += -1e100;
    EXPECT_EQ(s.value(), 2.0);
}

TEST(Summation, OrderedSumIgnoresInputOrder) {
    std::vector<double> terms;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) terms.push_back(std::ldexp(u(rng), static_cast<int>(i % 60) - 30));
    const double forward = ordered_sum(terms);
    std::shuffle(terms.begin(), terms.end(), rng);
    EXPECT_EQ(ordered_sum(terms), forward);
}

TEST(Summation, LogSumExpMatchesDirect) {
    const std::vector<double> e{-1.0, 0.5, 2.0, -700.0};
    const std::vector<double> w{1.0, 2.0, 1.0, 3.0};
    double direct = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) direct += w[i] * std::exp(e[i]);
    EXPECT_NEAR(log_sum_exp(e, w), std::log(direct), 1e-14);
    // huge exponents stay finite
    const std::vector<double> big{1000.0, 1000.0};
    const std::vector<double> ones{1.0, 1.0};
    EXPECT_NEAR(log_sum_exp(big, ones), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Parallel, EveryIndexVisitedOnce) {
    for (const int threads : {1, 2, 3, 8}) {
        std::vector<std::atomic<int>> hits(1001);
        parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
        for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
}

TEST(Parallel, LowestFailingBlockWins) {
    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 10) throw std::runtime_error("low");
            if (i == 90) throw std::runtime_error("high");
        });
        FAIL() << "no exception";
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "low");
    }
}

TEST(Parallel, ZeroWorkIsFine) {
    int calls = 0;
    parallel_for(0, 4, [&](std::size_t) { ++calls; });
    EXPECT_EQ(calls, 0);
}
