#ifndef POLYDYN_DOUBLE_DOUBLE_HPP
#define POLYDYN_DOUBLE_DOUBLE_HPP

#include <cmath>
#include <complex>

namespace polydyn {

/// Unevaluated sum hi + lo of two doubles with |lo| <= ulp(hi)/2, giving
/// roughly 106 bits of significand. Used by the extended-precision mode to
/// polish preimages in deep trees; the hot path stays in plain double.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double x) : hi(x), lo(0.0) {} // NOLINT(implicit)
    constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace dd_detail {

inline DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DoubleDouble fast_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = dd_detail::two_sum(a.hi, b.hi);
    DoubleDouble t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::fast_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::fast_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    DoubleDouble p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::fast_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
    const double q1 = a.hi / b.hi;
    DoubleDouble r = a - b * DoubleDouble(q1);
    const double q2 = r.hi / b.hi;
    r = r - b * DoubleDouble(q2);
    const double q3 = r.hi / b.hi;
    return dd_detail::fast_two_sum(q1, q2) + DoubleDouble(q3);
}

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }

inline bool operator<(DoubleDouble a, DoubleDouble b) {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi == b.hi && a.lo == b.lo; }

inline DoubleDouble sqrt(DoubleDouble a) {
    if (a.hi <= 0.0) return {0.0, 0.0};
    const double x = std::sqrt(a.hi);
    // one Newton step on x^2 = a in double-double
    const DoubleDouble xx = dd_detail::two_prod(x, x);
    const double correction = ((a - xx).hi) / (2.0 * x);
    return dd_detail::fast_two_sum(x, correction);
}

inline DoubleDouble abs(DoubleDouble a) { return a.hi < 0.0 ? -a : a; }

/// Complex number over DoubleDouble. Only the operations the polishing and
/// orbit code need are provided.
struct ComplexDD {
    DoubleDouble re;
    DoubleDouble im;

    ComplexDD() = default;
    ComplexDD(DoubleDouble r, DoubleDouble i) : re(r), im(i) {}
    ComplexDD(std::complex<double> z) : re(z.real()), im(z.imag()) {} // NOLINT(implicit)

    std::complex<double> to_complex() const { return {double(re), double(im)}; }
};

inline ComplexDD operator+(const ComplexDD& a, const ComplexDD& b) { return {a.re + b.re, a.im + b.im}; }
inline ComplexDD operator-(const ComplexDD& a, const ComplexDD& b) { return {a.re - b.re, a.im - b.im}; }
inline ComplexDD operator*(const ComplexDD& a, const ComplexDD& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline ComplexDD operator/(const ComplexDD& a, const ComplexDD& b) {
    const DoubleDouble den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

inline double abs(const ComplexDD& z) { return std::abs(z.to_complex()); }

/// Squared modulus carried in DoubleDouble.
inline DoubleDouble norm(const ComplexDD& z) { return z.re * z.re + z.im * z.im; }

} // namespace polydyn

#endif // POLYDYN_DOUBLE_DOUBLE_HPP
