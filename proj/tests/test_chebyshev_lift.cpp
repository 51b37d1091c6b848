#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "polydyn/chebyshev_lift.hpp"

using namespace polydyn;

TEST(Zhukovsky, InverseLandsInDiscAndRoundTrips) {
    for (const Complex x : {Complex(0.3, 0.0), Complex(1.5, -0.2), Complex(-3.0, 2.0), Complex(0.0, 0.01)}) {
        const Complex w = zhukovsky_inverse(x);
        EXPECT_LE(std::abs(w), 1.0 + 1e-15);
        EXPECT_LT(std::abs(zhukovsky(w) - x), 1e-13);
    }
    // on the unit circle Pi is cos
    EXPECT_LT(std::abs(zhukovsky(std::polar(1.0, 0.8)) - std::cos(0.8)), 1e-15);
}

TEST(Zhukovsky, DerivativeByDifferences) {
    const Complex z(0.4, 0.7), h(1e-6, 0.0);
    const Complex fd = (zhukovsky(z + h) - zhukovsky(z - h)) / (2.0 * h);
    EXPECT_LT(std::abs(fd - zhukovsky_derivative(z)), 1e-8);
    EXPECT_THROW(zhukovsky(0.0), ZeroInput);
    EXPECT_THROW(zhukovsky_derivative(0.0), ZeroInput);
}

TEST(Chebyshev, CosineIdentity) {
    for (int k = 1; k <= 7; ++k) {
        const Polynomial t = chebyshev(k);
        EXPECT_EQ(t.degree(), k);
        for (double s = 0.0; s < 3.0; s += 0.37) EXPECT_NEAR(t(Complex(std::cos(s))).real(), std::cos(k * s), 1e-13);
    }
    EXPECT_THROW(chebyshev(0), std::invalid_argument);
}

TEST(Normalization, QuadraticChebyshevSystem) {
    const LiftedSystem sys = chebyshev_quadratic_system();
    EXPECT_EQ(sys.k, 2);
    EXPECT_EQ(sys.sign, 1);
    // A maps [-2, 2] onto [-1, 1]
    EXPECT_NEAR(std::abs(sys.A(-2.0) + 1.0) + std::abs(sys.A(2.0) - 1.0), 0.0, 1e-15);
    EXPECT_LT(semiconjugacy_error(sys), 1e-13);
}

TEST(Normalization, NegativeSignVariant) {
    // -(z^2 - 2) conjugated by z -> -z gives z^2 - 2 again; 2 - z^2 on [-2, 2] is -T_2
    const LiftedSystem sys = normalize_to_chebyshev(Polynomial{2.0, 0.0, -1.0}, -2.0, 2.0);
    EXPECT_EQ(sys.sign, -1);
    EXPECT_LT(semiconjugacy_error(sys), 1e-13);
}

TEST(Normalization, RejectsOtherMaps) {
    // z^3 - 3z on [-2, 2] is a degree-3 Chebyshev map
    const Normalization n = normalize_interval(Polynomial{0.0, -3.0, 0.0, 1.0}, -2.0, 2.0);
    EXPECT_EQ(n.restriction_degree, 3);
    EXPECT_EQ(n.sign, 1);
    EXPECT_THROW(normalize_to_chebyshev(Polynomial{0.0, -3.0, 0.0, 1.0}, -2.0, 2.0), NotDegreeTwo);
    // z^2 - 1.9 has the right shape but the wrong interval
    EXPECT_THROW(normalize_to_chebyshev(Polynomial{-1.9, 0.0, 1.0}, -2.0, 2.0), NotDegreeTwo);
}

TEST(Conjugacy, BackwardOrbitOfEndpointMatchesDoubling) {
    const ConjugacyCheck c = interval_conjugacy(Polynomial{-2.0, 0.0, 1.0}, -2.0, 2.0, 10);
    EXPECT_TRUE(c.count_ok);
    EXPECT_EQ(c.points, c.expected);
    EXPECT_LT(c.residual, 1e-9);
    // level-10 preimages are 2 cos(pi j / 512); the widest gap is between
    // j = 255 and j = 256
    const double widest = 2.0 * (std::cos(255.0 * std::numbers::pi / 512.0) - std::cos(256.0 * std::numbers::pi / 512.0));
    EXPECT_NEAR(c.max_gap, widest, 1e-9);
}

TEST(Transfer, IdentityHoldsOnSamples) {
    const LiftedSystem sys = chebyshev_quadratic_system();
    for (int n = 1; n <= 8; ++n) {
        const TransferCheck c = verify_transfer_identity(sys, Complex(0.3 - 0.1 * n, 0.2 + 0.05 * n), n);
        EXPECT_LT(c.relative_error, 1e-10) << n;
    }
}

TEST(Transfer, DirectSumMatchesCircleAverage) {
    // independent evaluation for n = 1: preimages of x under z^2 - 2 are
    // +-sqrt(x + 2), each with |f'| = 2 |sqrt(x + 2)|
    const LiftedSystem sys = chebyshev_quadratic_system();
    const Complex x(0.7, 0.4);
    const double direct = 2.0 / (2.0 * std::abs(std::sqrt(x + 2.0)));
    EXPECT_NEAR(verify_transfer_identity(sys, x, 1).lhs, direct, 1e-13);
}

TEST(Transfer, RamificationReported) {
    // x = 2 lifts to w = 1, the ramification point
    EXPECT_THROW(verify_transfer_identity(chebyshev_quadratic_system(), Complex(2.0 - 1e-15, 0.0), 3), Error);
}

TEST(CircleSum, EqualsOneOnTheCircle) {
    const LiftedSystem sys = chebyshev_quadratic_system();
    for (int n = 1; n <= 10; ++n) EXPECT_NEAR(circle_sum(sys, std::polar(1.0, 0.3 * n), n), 1.0, 1e-12);
    // off the circle: |v| = r^{1/2^n}, sum = 2^n / (2^n |v|^{2^n - 1})
    const double r = 0.5;
    const double v = std::pow(r, 1.0 / 8.0);
    EXPECT_NEAR(circle_sum(sys, Complex(r, 0.0), 3), 1.0 / std::pow(v, 7.0), 1e-12);
}
