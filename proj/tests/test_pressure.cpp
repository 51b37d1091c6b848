#include <gtest/gtest.h>

#include <cmath>

#include "polydyn/cubic_family.hpp"
#include "polydyn/pressure.hpp"

using namespace polydyn;

TEST(PreimageTree, LeafCountIsDegreePower) {
    const Polynomial p{Complex(0.3, -0.2), 1.0, 0.5, 1.0};
    const PreimageTree tree = preimage_tree(p, Complex(0.1, 0.9), 5);
    ASSERT_EQ(tree.depth(), 5);
    for (int k = 0; k <= 5; ++k) EXPECT_DOUBLE_EQ(tree.leaf_count(k), std::pow(3.0, k));
}

TEST(PreimageTree, LeavesMapBackToBase) {
    const Polynomial p{-2.0, 0.0, 1.0};
    const Complex x(0.4, 0.3);
    const PreimageTree tree = preimage_tree(p, x, 6);
    for (const auto& leaf : tree.leaves()) {
        const auto od = orbit_derivative(p, leaf.point, 6);
        EXPECT_LT(std::abs(od.point - x), 1e-9);
        EXPECT_NEAR(leaf.log_derivative, std::log(std::abs(od.derivative)), 1e-9);
    }
}

TEST(PreimageTree, ThreadCountDoesNotChangeSums) {
    const Polynomial p = cubic_map(0.05, 2.1296224513683883);
    TreeOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const PressureEstimate a = pressure_from_tree(preimage_tree(p, Complex(1.0, 0.5), 8, one), 1.0);
    const PressureEstimate b = pressure_from_tree(preimage_tree(p, Complex(1.0, 0.5), 8, four), 1.0);
    EXPECT_EQ(a.log_sums, b.log_sums);
}

TEST(PreimageTree, DoubleDoubleAgreesWithDouble) {
    const Polynomial p{-2.0, 0.0, 1.0};
    TreeOptions dd;
    dd.precision = Precision::DoubleDouble;
    const PressureEstimate a = pressure_estimate(p, 1.0, Complex(1.0, 0.5), 10);
    const PressureEstimate b = pressure_estimate(p, 1.0, Complex(1.0, 0.5), 10, dd);
    for (std::size_t i = 0; i < a.log_sums.size(); ++i) EXPECT_NEAR(a.log_sums[i], b.log_sums[i], 1e-11);
}

TEST(PreimageTree, LeafCapEnforced) {
    TreeOptions opt;
    opt.leaf_cap = 1000;
    EXPECT_THROW(preimage_tree(Polynomial::monomial(2), Complex(1.0), 10, opt), LeafBudgetExceeded);
    EXPECT_NO_THROW(preimage_tree(Polynomial::monomial(2), Complex(1.0), 9, opt));
}

TEST(Pressure, PowerMapOnUnitCircleIsExact) {
    // preimages of |x| = 1 under z^d stay on the circle: |(f^n)'| = d^n
    for (const int d : {2, 3}) {
        const PreimageTree tree = preimage_tree(Polynomial::monomial(d), std::polar(1.0, 0.7), 9);
        for (const double t : {0.0, 0.5, 1.0, 1.5}) {
            const PressureEstimate est = pressure_from_tree(tree, t);
            for (const double r : est.rates) EXPECT_NEAR(r, (1.0 - t) * std::log(d), 1e-12) << d << " " << t;
            EXPECT_NEAR(est.value, (1.0 - t) * std::log(d), 1e-12);
        }
    }
}

TEST(Pressure, PowerMapOffTheCircleMatchesClosedForm) {
    // z^2, |x| = 4: every n-th preimage has |y| = 4^{2^-n} and
    // |(f^n)'(y)| = 2^n |y|^{2^n - 1}
    const int n_max = 8;
    const PreimageTree tree = preimage_tree(Polynomial::monomial(2), Complex(0.0, 4.0), n_max);
    const double t = 1.3;
    const PressureEstimate est = pressure_from_tree(tree, t);
    for (int n = 1; n <= n_max; ++n) {
        const double m = std::ldexp(1.0, n);
        const double log_y = std::log(4.0) / m;
        const double log_s = n * std::log(2.0) - t * (n * std::log(2.0) + (m - 1.0) * log_y);
        EXPECT_NEAR(est.log_sums[static_cast<std::size_t>(n - 1)], log_s, 1e-11) << n;
    }
}

TEST(Pressure, EntropyAtZero) {
    for (const Polynomial& p : {Polynomial{-2.0, 0.0, 1.0}, cubic_map(0.05, 2.1296224513683883),
                                Polynomial{Complex(0.2, 0.1), Complex(0.0, 1.0), 0.0, 0.0, 1.0}}) {
        const PressureEstimate est = pressure_estimate(p, 0.0, Complex(1.0, 0.5), 6);
        for (const double r : est.rates) EXPECT_NEAR(r, std::log(p.degree()), 1e-12);
    }
}

TEST(Pressure, NonIncreasingInT) {
    const PreimageTree tree = preimage_tree(cubic_map(0.05, 2.1296224513683883), Complex(1.0, 0.5), 8);
    double last = std::numeric_limits<double>::infinity();
    for (double t = 0.0; t <= 2.0; t += 0.25) {
        const double v = pressure_from_tree(tree, t).log_sums.back();
        EXPECT_LT(v, last);
        last = v;
    }
}

TEST(Pressure, PostCriticalBaseRejected) {
    // 0 -> -2 -> 2
    EXPECT_THROW(pressure_estimate(Polynomial{-2.0, 0.0, 1.0}, 1.0, Complex(2.0), 4), PostCriticalBase);
    EXPECT_THROW(validate_base_point(Polynomial{-2.0, 0.0, 1.0}, Complex(-2.0 + 1e-7), 1), PostCriticalBase);
    EXPECT_NO_THROW(validate_base_point(Polynomial{-2.0, 0.0, 1.0}, Complex(-2.0 + 1e-5), 4));
}

TEST(Pressure, CriticalLeafFlagged) {
    const PreimageTree tree = preimage_tree(Polynomial::monomial(2), Complex(0.0), 3);
    EXPECT_TRUE(tree.near_critical);
    EXPECT_THROW(pressure_from_tree(tree, 1.0), NearCriticalValue);
    EXPECT_NO_THROW(pressure_from_tree(tree, 0.0));
}

TEST(Bowen, PowerMapZeroAtOne) {
    for (const int d : {2, 3}) {
        const BowenZero z = bowen_zero(Polynomial::monomial(d), Complex(1.0), 8, 0.5, 2.0, 1e-4);
        EXPECT_NEAR(z.t, 1.0, 1e-4);
        EXPECT_LE(z.hi - z.lo, 1e-4);
    }
}

TEST(Bowen, NoBracketReported) {
    EXPECT_THROW(bowen_zero(Polynomial::monomial(2), Complex(1.0), 6, 1.5, 2.0), NoBracket);
}

TEST(Restricted, UnrestrictedPowerMapGivesZero) {
    const auto L = restricted_sums(Polynomial::monomial(2), std::polar(1.0, 0.2), 7, [](Complex) { return true; });
    ASSERT_EQ(L.size(), 7u);
    for (const double v : L) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Restricted, HalfPlaneKeepsHalfTheBranches) {
    // z^2 on the unit circle: keep preimages in the upper half plane; each
    // level keeps exactly one of the two roots, so L_k = -k log 2
    const auto L = restricted_sums(Polynomial::monomial(2), std::polar(1.0, 0.9), 5,
                                   [](Complex z) { return z.imag() > 0.0; });
    for (std::size_t k = 0; k < L.size(); ++k) EXPECT_NEAR(L[k], -static_cast<double>(k + 1) * std::log(2.0), 1e-12);
}

TEST(Restricted, EmptyTreeReported) {
    EXPECT_THROW(restricted_sums(Polynomial::monomial(2), Complex(1.0), 3, [](Complex) { return false; }), EmptyTree);
}
