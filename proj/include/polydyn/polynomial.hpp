#ifndef POLYDYN_POLYNOMIAL_HPP
#define POLYDYN_POLYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polydyn/double_double.hpp"
#include "polydyn/error.hpp"

namespace polydyn {

using Complex = std::complex<double>;

/// Complex-coefficient polynomial, coefficients indexed by power.
/// The leading coefficient is always nonzero.
class Polynomial {
public:
    explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
        while (!coeffs_.empty() && coeffs_.back() == Complex(0.0))
            coeffs_.pop_back();
        if (coeffs_.empty())
            throw std::invalid_argument("Polynomial: zero polynomial has no degree");
    }

    Polynomial(std::initializer_list<Complex> coeffs) : Polynomial(std::vector<Complex>(coeffs)) {}

    static Polynomial monomial(int degree, Complex lead = 1.0) {
        std::vector<Complex> c(static_cast<std::size_t>(degree) + 1, 0.0);
        c.back() = lead;
        return Polynomial(std::move(c));
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    Complex operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
    Complex leading() const { return coeffs_.back(); }

    Complex operator()(Complex z) const {
        Complex acc = coeffs_.back();
        for (int i = degree() - 1; i >= 0; --i)
            acc = acc * z + coeffs_[static_cast<std::size_t>(i)];
        return acc;
    }

    /// Simultaneous Horner evaluation of p(z) and p'(z).
    std::pair<Complex, Complex> value_and_derivative(Complex z) const {
        Complex value = coeffs_.back();
        Complex slope = 0.0;
        for (int i = degree() - 1; i >= 0; --i) {
            slope = slope * z + value;
            value = value * z + coeffs_[static_cast<std::size_t>(i)];
        }
        return {value, slope};
    }

    /// Sum of |a_i| |z|^i, the scale Horner rounding errors are measured against.
    double magnitude_at(double r) const {
        double acc = 0.0;
        for (int i = degree(); i >= 0; --i)
            acc = acc * r + std::abs(coeffs_[static_cast<std::size_t>(i)]);
        return acc;
    }

    Polynomial derivative() const {
        if (degree() < 1)
            throw std::domain_error("Polynomial::derivative: constant polynomial");
        std::vector<Complex> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            d[i - 1] = coeffs_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    /// p - c, i.e. the polynomial whose roots are the preimages of c.
    Polynomial minus_constant(Complex c) const {
        auto d = coeffs_;
        d[0] -= c;
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(Complex s, const Polynomial& p) {
        auto c = p.coeffs_;
        for (auto& x : c) x *= s;
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(c));
    }

    /// p(q(z)) by Horner over polynomials.
    Polynomial compose(const Polynomial& q) const {
        Polynomial acc({coeffs_.back()});
        for (int i = degree() - 1; i >= 0; --i) {
            acc = acc * q;
            if (coeffs_[static_cast<std::size_t>(i)] != Complex(0.0)) acc = acc + Polynomial({coeffs_[static_cast<std::size_t>(i)]});
        }
        return acc;
    }

    /// Cauchy bound 1 + max |a_i / a_d|: every root has modulus below it.
    double cauchy_bound() const {
        double m = 0.0;
        const double lead = std::abs(leading());
        for (int i = 0; i < degree(); ++i)
            m = std::max(m, std::abs(coeffs_[static_cast<std::size_t>(i)]) / lead);
        return 1.0 + m;
    }

private:
    std::vector<Complex> coeffs_;
};

inline Complex eval(const Polynomial& p, Complex z) { return p(z); }

inline Polynomial derivative(const Polynomial& p) { return p.derivative(); }

/// Horner evaluation in double-double.
inline ComplexDD eval(const Polynomial& p, const ComplexDD& z) {
    ComplexDD acc(p.leading());
    for (int i = p.degree() - 1; i >= 0; --i)
        acc = acc * z + ComplexDD(p[i]);
    return acc;
}

inline std::pair<ComplexDD, ComplexDD> value_and_derivative(const Polynomial& p, const ComplexDD& z) {
    ComplexDD value(p.leading());
    ComplexDD slope(Complex(0.0));
    for (int i = p.degree() - 1; i >= 0; --i) {
        slope = slope * z + value;
        value = value * z + ComplexDD(p[i]);
    }
    return {value, slope};
}

/// Result of pushing a point n steps forward together with the chain-rule
/// derivative (f^n)'(z).
template <class Z>
struct OrbitDerivative {
    Z point;
    Z derivative;
    bool overflow = false; ///< orbit left the representable range; values are not meaningful
};

/// (f^n(z), prod_{j<n} f'(f^j(z))). Stops and flags overflow when the orbit
/// becomes non-finite.
inline OrbitDerivative<Complex> orbit_derivative(const Polynomial& p, Complex z, int n) {
    if (n < 0) throw std::invalid_argument("orbit_derivative: n < 0");
    Complex d = 1.0;
    for (int j = 0; j < n; ++j) {
        auto [value, slope] = p.value_and_derivative(z);
        d *= slope;
        z = value;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !std::isfinite(d.real()) ||
            !std::isfinite(d.imag()))
            return {z, d, true};
    }
    return {z, d, false};
}

inline OrbitDerivative<ComplexDD> orbit_derivative(const Polynomial& p, ComplexDD z, int n) {
    if (n < 0) throw std::invalid_argument("orbit_derivative: n < 0");
    ComplexDD d(Complex(1.0));
    for (int j = 0; j < n; ++j) {
        auto [value, slope] = value_and_derivative(p, z);
        d = d * slope;
        z = value;
        const Complex zc = z.to_complex();
        if (!std::isfinite(zc.real()) || !std::isfinite(zc.imag()) || !std::isfinite(std::abs(d.to_complex())))
            return {z, d, true};
    }
    return {z, d, false};
}

struct Root {
    Complex z;
    int multiplicity = 1;
};

struct RootOptions {
    int max_iterations = 500;
    int polish_steps = 2;
    /// Roots closer than merge_factor * cauchy_bound are reported as one multiple root.
    double merge_factor = 1e-9;
};

namespace detail {

// Irrational angular offset of the starting circle; keeps the initial
// points off any symmetry axis of the polynomial.
inline constexpr double kStartAngle = 0.6180339887498949;

inline bool root_less(const Root& a, const Root& b) {
    const double aa = std::arg(a.z), ab = std::arg(b.z);
    if (aa != ab) return aa < ab;
    return std::abs(a.z) < std::abs(b.z);
}

} // namespace detail

/// All roots of p counted with multiplicity, by Aberth–Ehrlich simultaneous
/// iteration followed by Newton polishing.
///
/// Every returned root satisfies |p(z)| <= tol * sum |a_i| |z|^i; otherwise
/// NonConvergence is thrown. Clusters tighter than the merge threshold are
/// collapsed to their centroid with the cluster size as multiplicity. The
/// result is sorted by argument, then modulus.
inline std::vector<Root> roots(const Polynomial& p, double tol = 1e-10, const RootOptions& opt = {}) {
    if (tol <= 0.0) throw std::invalid_argument("roots: tol must be positive");
    const int d = p.degree();
    if (d < 1) throw std::invalid_argument("roots: degree must be at least 1");
    if (d == 1) return {Root{-p[0] / p[1], 1}};

    const double bound = p.cauchy_bound();
    const Complex center = -p[d - 1] / (static_cast<double>(d) * p.leading());
    std::vector<Complex> z(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        const double angle = (2.0 * std::numbers::pi * k + detail::kStartAngle) / d;
        z[static_cast<std::size_t>(k)] = center + std::polar(bound, angle);
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    std::vector<char> done(static_cast<std::size_t>(d), 0);
    int active = d;
    for (int iter = 0; iter < opt.max_iterations && active > 0; ++iter) {
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (done[i]) continue;
            auto [value, slope] = p.value_and_derivative(z[i]);
            if (std::abs(value) <= 4.0 * eps * p.magnitude_at(std::abs(z[i]))) {
                done[i] = 1;
                --active;
                continue;
            }
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j)
                if (j != i && z[j] != z[i]) repulsion += 1.0 / (z[i] - z[j]);
            if (slope == Complex(0.0)) {
                // sitting on a critical point of p: nudge off it
                z[i] += std::polar(1e-8 * bound, detail::kStartAngle * (iter + 1));
                continue;
            }
            const Complex ratio = value / slope;
            Complex step = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
                step = ratio;
            z[i] -= step;
            if (std::abs(step) <= 2.0 * eps * std::abs(z[i])) {
                done[i] = 1;
                --active;
            }
        }
    }

    for (auto& zi : z) {
        for (int s = 0; s < opt.polish_steps; ++s) {
            auto [value, slope] = p.value_and_derivative(zi);
            if (slope == Complex(0.0)) break;
            const Complex next = zi - value / slope;
            if (std::abs(p(next)) < std::abs(value)) zi = next;
            else break;
        }
        const double residual = std::abs(p(zi));
        const double scale = p.magnitude_at(std::abs(zi));
        if (!(residual <= tol * scale))
            throw NonConvergence("Aberth iteration did not reach residual " + std::to_string(tol) +
                                 " (got " + std::to_string(residual / scale) + ")");
    }

    // single-linkage clustering below the merge threshold
    const double merge = opt.merge_factor * bound;
    std::vector<int> parent(static_cast<std::size_t>(d));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
        return i;
    };
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]) < merge)
                parent[static_cast<std::size_t>(find(j))] = find(i);

    std::vector<Root> out;
    for (int i = 0; i < d; ++i) {
        if (find(i) != i) continue;
        Complex sum = 0.0;
        int count = 0;
        for (int j = 0; j < d; ++j)
            if (find(j) == i) {
                sum += z[static_cast<std::size_t>(j)];
                ++count;
            }
        out.push_back({sum / static_cast<double>(count), count});
    }
    std::sort(out.begin(), out.end(), detail::root_less);
    return out;
}

/// Newton refinement of an approximate root of p(w) = target in double-double.
inline ComplexDD polish_preimage(const Polynomial& p, const ComplexDD& target, ComplexDD w, int steps = 3) {
    for (int s = 0; s < steps; ++s) {
        auto [value, slope] = value_and_derivative(p, w);
        const ComplexDD residual = value - target;
        if (slope.to_complex() == Complex(0.0)) break;
        w = w - residual / slope;
    }
    return w;
}

/// Roots of p' with multiplicity: the d-1 critical points of p.
inline std::vector<Root> critical_points(const Polynomial& p, double tol = 1e-10) {
    if (p.degree() < 2) throw std::invalid_argument("critical_points: degree must be at least 2");
    return roots(p.derivative(), tol);
}

} // namespace polydyn

#endif // POLYDYN_POLYNOMIAL_HPP
