#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polydyn/polynomial.hpp"

using namespace polydyn;

namespace {

// Roots as points, order-free comparison.
bool has_root(const std::vector<Root>& rs, Complex z, double tol, int mult = 1) {
    return std::any_of(rs.begin(), rs.end(), [&](const Root& r) { return std::abs(r.z - z) < tol && r.multiplicity == mult; });
}

} // namespace

TEST(Polynomial, StripsTrailingZerosAndRejectsZero) {
    const Polynomial p{1.0, 2.0, 0.0, 0.0};
    EXPECT_EQ(p.degree(), 1);
    EXPECT_THROW(Polynomial({0.0, 0.0}), std::invalid_argument);
}

TEST(Polynomial, HornerMatchesDirectSum) {
    const Polynomial p{Complex(1, -1), 2.0, Complex(0, 3), -0.5};
    const Complex z(0.3, -1.7);
    const Complex direct = Complex(1, -1) + 2.0 * z + Complex(0, 3) * z * z - 0.5 * z * z * z;
    EXPECT_LT(std::abs(p(z) - direct), 1e-13);
    const auto [v, d] = p.value_and_derivative(z);
    EXPECT_LT(std::abs(v - direct), 1e-13);
    const Complex slope = 2.0 + 2.0 * Complex(0, 3) * z - 1.5 * z * z;
    EXPECT_LT(std::abs(d - slope), 1e-13);
    EXPECT_LT(std::abs(p.derivative()(z) - slope), 1e-13);
}

TEST(Polynomial, ComposeAgreesWithNestedEvaluation) {
    const Polynomial p{-2.0, 0.0, 1.0};
    const Polynomial q{0.5, 0.0, 0.0, 1.0};
    const Polynomial pq = p.compose(q);
    EXPECT_EQ(pq.degree(), 6);
    for (const Complex z : {Complex(0.1, 0.2), Complex(-1.3, 0.7), Complex(2.0, 0.0)})
        EXPECT_LT(std::abs(pq(z) - p(q(z))), 1e-12 * (1.0 + std::abs(pq(z))));
    // zero coefficients in the outer polynomial
    const Polynomial cube = Polynomial::monomial(3).compose(Polynomial{1.0, 1.0});
    EXPECT_LT(std::abs(cube[0] - 1.0) + std::abs(cube[1] - 3.0) + std::abs(cube[2] - 3.0) + std::abs(cube[3] - 1.0), 1e-15);
}

TEST(Polynomial, CauchyBoundEnclosesRoots) {
    const Polynomial p{6.0, -5.0, 1.0};
    EXPECT_DOUBLE_EQ(p.cauchy_bound(), 7.0);
    for (const auto& r : roots(p)) EXPECT_LT(std::abs(r.z), p.cauchy_bound());
}

TEST(Roots, UnitRootsOfZToTheNMinusOne) {
    for (const int n : {2, 3, 5, 8, 17}) {
        const auto rs = roots(Polynomial::monomial(n).minus_constant(1.0));
        ASSERT_EQ(rs.size(), static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
            EXPECT_TRUE(has_root(rs, std::polar(1.0, 2.0 * std::numbers::pi * k / n), 1e-12)) << n << " " << k;
    }
}

TEST(Roots, QuadraticFormula) {
    const Complex a(1.0, 0.5), b(-2.0, 1.0), c(0.25, -3.0);
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    const auto rs = roots(Polynomial{c, b, a});
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_TRUE(has_root(rs, (-b + disc) / (2.0 * a), 1e-12));
    EXPECT_TRUE(has_root(rs, (-b - disc) / (2.0 * a), 1e-12));
}

TEST(Roots, ExactMultipleRootMergedWithMultiplicity) {
    // z^3 (z + 2)
    const auto rs = roots(Polynomial{0.0, 0.0, 0.0, 2.0, 1.0});
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_TRUE(has_root(rs, 0.0, 1e-12, 3));
    EXPECT_TRUE(has_root(rs, -2.0, 1e-12, 1));
}

TEST(Roots, PerturbedTripleRootStaysClustered) {
    // (z - 1)^3 (z + 2): rounding splits the triple root by about eps^{1/3}
    const Polynomial p = Polynomial{-1.0, 1.0} * Polynomial{-1.0, 1.0} * Polynomial{-1.0, 1.0} * Polynomial{2.0, 1.0};
    const auto rs = roots(p);
    int near_one = 0;
    for (const auto& r : rs)
        if (std::abs(r.z - 1.0) < 1e-4) near_one += r.multiplicity;
    EXPECT_EQ(near_one, 3);
    EXPECT_TRUE(has_root(rs, -2.0, 1e-10, 1));
}

TEST(Roots, SortedByArgumentThenModulus) {
    const auto rs = roots(Polynomial::monomial(6).minus_constant(Complex(0.0, 1.0)));
    for (std::size_t i = 1; i < rs.size(); ++i) EXPECT_LE(std::arg(rs[i - 1].z), std::arg(rs[i].z));
}

TEST(Roots, RejectsBadArguments) {
    EXPECT_THROW(roots(Polynomial{1.0}), std::invalid_argument);
    EXPECT_THROW(roots(Polynomial{1.0, 1.0}, 0.0), std::invalid_argument);
}

TEST(Roots, DegreeOneDirect) {
    const auto rs = roots(Polynomial{Complex(2.0, 1.0), Complex(0.0, 1.0)});
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_LT(std::abs(rs[0].z - Complex(-1.0, 2.0)), 1e-15);
}

TEST(CriticalPoints, CubicFamilyShape) {
    // e z^3 + z^2 - b has critical points 0 and -2/(3e)
    const double e = 0.05;
    const auto cs = critical_points(Polynomial{-2.1, 0.0, 1.0, e});
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_TRUE(has_root(cs, 0.0, 1e-12));
    EXPECT_TRUE(has_root(cs, -2.0 / (3.0 * e), 1e-10));
    const auto double_crit = critical_points(Polynomial::monomial(3));
    ASSERT_EQ(double_crit.size(), 1u);
    EXPECT_EQ(double_crit[0].multiplicity, 2);
}

TEST(OrbitDerivative, ChainRuleOnPowerMap) {
    // z^2: f^n(z) = z^{2^n}, (f^n)'(z) = 2^n z^{2^n - 1}
    const Complex z = std::polar(1.0, 0.3);
    const auto od = orbit_derivative(Polynomial::monomial(2), z, 6);
    EXPECT_FALSE(od.overflow);
    EXPECT_LT(std::abs(od.point - std::polar(1.0, 0.3 * 64)), 1e-12);
    EXPECT_LT(std::abs(od.derivative - 64.0 * std::polar(1.0, 0.3 * 63)), 1e-10);
}

TEST(OrbitDerivative, FlagsOverflow) {
    const auto od = orbit_derivative(Polynomial::monomial(2), Complex(10.0), 20);
    EXPECT_TRUE(od.overflow);
    EXPECT_THROW(orbit_derivative(Polynomial::monomial(2), Complex(1.0), -1), std::invalid_argument);
}

TEST(DoubleDouble, ProductCarriesLowOrderBits) {
    const DoubleDouble a(1.0 + std::ldexp(1.0, -30));
    const DoubleDouble sq = a * a;
    // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60; the last term is below double precision
    EXPECT_EQ(sq.hi, 1.0 + std::ldexp(1.0, -29));
    EXPECT_EQ(sq.lo, std::ldexp(1.0, -60));
    const DoubleDouble q = DoubleDouble(1.0) / DoubleDouble(3.0);
    const DoubleDouble back = q * DoubleDouble(3.0) - DoubleDouble(1.0);
    EXPECT_LT(std::abs(double(back)), 1e-30);
}

TEST(DoubleDouble, PolishedPreimageBeatsDouble) {
    const Polynomial p{-2.0, 0.0, 1.0};
    const ComplexDD target(Complex(0.3, 0.4));
    const ComplexDD w = polish_preimage(p, target, Complex(std::sqrt(Complex(2.3, 0.4))));
    const ComplexDD residual = eval(p, w) - target;
    EXPECT_LT(abs(residual), 1e-28);
}

TEST(DoubleDouble, OrbitDerivativeMatchesDouble) {
    const Polynomial p{Complex(-0.1, 0.6), 0.0, 1.0};
    const Complex z(0.2, 0.1);
    const auto a = orbit_derivative(p, z, 8);
    const auto b = orbit_derivative(p, ComplexDD(z), 8);
    EXPECT_LT(std::abs(a.point - b.point.to_complex()), 1e-12);
    EXPECT_LT(std::abs(a.derivative - b.derivative.to_complex()), 1e-10 * std::abs(a.derivative));
}
