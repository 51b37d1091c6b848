#ifndef POLYDYN_CHEBYSHEV_LIFT_HPP
#define POLYDYN_CHEBYSHEV_LIFT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "polydyn/error.hpp"
#include "polydyn/polynomial.hpp"
#include "polydyn/pressure.hpp"

namespace polydyn {

/// Pi(z) = (z + 1/z) / 2.
inline Complex zhukovsky(Complex z) {
    if (z == Complex(0.0)) throw ZeroInput("zhukovsky: z = 0");
    return 0.5 * (z + 1.0 / z);
}

inline Complex zhukovsky_derivative(Complex z) {
    if (z == Complex(0.0)) throw ZeroInput("zhukovsky_derivative: z = 0");
    return 0.5 * (1.0 - 1.0 / (z * z));
}

/// The preimage of x under Pi inside the closed unit disc. The two
/// preimages are w and 1/w; on [-1, 1] both have modulus 1.
inline Complex zhukovsky_inverse(Complex x) {
    Complex w = x - std::sqrt(x - 1.0) * std::sqrt(x + 1.0);
    if (std::abs(w) > 1.0) w = 1.0 / w;
    return w;
}

/// Chebyshev polynomial T_k with T_k(cos s) = cos(ks).
inline Polynomial chebyshev(int k) {
    if (k < 1) throw std::invalid_argument("chebyshev: k must be at least 1");
    Polynomial prev{1.0}, cur{0.0, 1.0};
    const Polynomial two_z{0.0, 2.0};
    for (int i = 1; i < k; ++i) {
        Polynomial next = two_z * cur + Complex(-1.0) * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// z -> scale * z + shift.
struct AffineMap {
    Complex scale = 1.0;
    Complex shift = 0.0;

    Complex operator()(Complex z) const { return scale * z + shift; }
    Complex inverse(Complex w) const { return (w - shift) / scale; }
    Polynomial as_polynomial() const { return Polynomial{shift, scale}; }
    Polynomial inverse_polynomial() const { return Polynomial{-shift / scale, 1.0 / scale}; }
};

/// Interval map q = sign * T_k on [-1, 1], its circle lift G(z) = sign * z^k
/// and the original map F = A^{-1} o q o A.
struct LiftedSystem {
    int k = 2;
    int sign = 1;
    AffineMap A;         ///< original coordinates -> [-1, 1]
    Polynomial original; ///< F
    Polynomial q;

    Complex G(Complex z) const { return static_cast<double>(sign) * std::pow(z, k); }
    double G_derivative_modulus(Complex z) const { return k * std::pow(std::abs(z), k - 1); }

    /// All v with G(v) = w, in argument order.
    std::vector<Complex> G_preimages(Complex w) const {
        const Complex u = static_cast<double>(sign) * w;
        const double r = std::pow(std::abs(u), 1.0 / k);
        const double a = std::arg(u);
        std::vector<Complex> out;
        for (int j = 0; j < k; ++j) out.push_back(std::polar(r, (a + 2.0 * std::numbers::pi * j) / k));
        return out;
    }
};

struct Normalization {
    AffineMap A;
    Polynomial q;             ///< A o p o A^{-1}
    int restriction_degree;   ///< 1 + critical points of p in the open interval
    int sign = 0;             ///< +1 / -1 when q = sign * T_k to 1e-12, else 0
    double coefficient_error; ///< max |q_i - sign * T_k,i|
};

/// Affine normalization of p on the real interval [alpha, omega] to [-1, 1].
inline Normalization normalize_interval(const Polynomial& p, double alpha, double omega) {
    if (!(omega > alpha)) throw std::invalid_argument("normalize_interval: need alpha < omega");
    AffineMap A{2.0 / (omega - alpha), -(alpha + omega) / (omega - alpha)};
    Normalization out{A, A.as_polynomial().compose(p.compose(A.inverse_polynomial())), 1, 0,
                      std::numeric_limits<double>::infinity()};
    for (const auto& c : critical_points(p)) {
        const double tol = 1e-9 * (omega - alpha);
        if (std::abs(c.z.imag()) < tol && c.z.real() > alpha + tol && c.z.real() < omega - tol)
            out.restriction_degree += c.multiplicity;
    }
    const Polynomial t = chebyshev(out.q.degree());
    for (const int s : {1, -1}) {
        double err = 0.0;
        for (int i = 0; i <= out.q.degree(); ++i) err = std::max(err, std::abs(out.q[i] - static_cast<double>(s) * t[i]));
        if (err < out.coefficient_error) {
            out.coefficient_error = err;
            if (err < 1e-12) out.sign = s;
        }
    }
    return out;
}

/// Exact Chebyshev normalization; q must equal +-T_2 on the nose.
inline LiftedSystem normalize_to_chebyshev(const Polynomial& p, double alpha, double omega) {
    const Normalization n = normalize_interval(p, alpha, omega);
    if (n.restriction_degree != 2) throw NotDegreeTwo("restriction to the interval has degree " +
                                                      std::to_string(n.restriction_degree));
    if (n.sign == 0 || n.q.degree() != 2)
        throw NotDegreeTwo("normalized map is not +-T_2 (coefficient error " + std::to_string(n.coefficient_error) + ")");
    return LiftedSystem{2, n.sign, n.A, p, n.q};
}

/// Real preimages in [alpha, omega], pooled and de-duplicated.
namespace detail {

inline std::vector<double> real_preimages(const Polynomial& p, const std::vector<double>& targets, double alpha,
                                          double omega) {
    const double slack = 1e-9 * (omega - alpha);
    std::vector<double> out;
    for (const double y : targets)
        for (const auto& r : roots(p.minus_constant(y), 1e-12)) {
            // double roots come back as two points about sqrt(eps) apart
            if (std::abs(r.z.imag()) > 1e-6) continue;
            const double x = std::clamp(r.z.real(), alpha, omega);
            if (r.z.real() < alpha - slack || r.z.real() > omega + slack) continue;
            out.push_back(x);
        }
    std::sort(out.begin(), out.end());
    std::vector<double> unique;
    for (const double x : out)
        if (unique.empty() || x - unique.back() > 1e-7 * (omega - alpha)) unique.push_back(x);
    return unique;
}

} // namespace detail

/// Topological conjugacy of p on [alpha, omega] to T_2 on [-1, 1], checked on
/// the backward orbit of the endpoint omega. The j-th point (ascending) of
/// the level-K preimage set is matched with -cos(pi j / 2^{K-1}).
struct ConjugacyCheck {
    int level = 0;
    std::size_t points = 0;   ///< level-K preimages found
    std::size_t expected = 0; ///< 2^{K-1} + 1
    double residual = 0.0;    ///< max |T_2(h(y)) - h(p(y))|
    double max_gap = 0.0;     ///< largest gap between consecutive level-K points
    bool count_ok = false;
};

inline ConjugacyCheck interval_conjugacy(const Polynomial& p, double alpha, double omega, int K = 10) {
    if (K < 1) throw std::invalid_argument("interval_conjugacy: K must be at least 1");
    std::vector<std::vector<double>> levels{{omega}};
    for (int k = 1; k <= K; ++k) levels.push_back(detail::real_preimages(p, levels.back(), alpha, omega));
    ConjugacyCheck out;
    out.level = K;
    out.points = levels[static_cast<std::size_t>(K)].size();
    out.expected = (std::size_t{1} << (K - 1)) + 1;
    out.count_ok = out.points == out.expected;
    const auto& top = levels[static_cast<std::size_t>(K)];
    for (std::size_t j = 1; j < top.size(); ++j) out.max_gap = std::max(out.max_gap, top[j] - top[j - 1]);
    if (!out.count_ok || K < 2) {
        out.residual = std::numeric_limits<double>::infinity();
        return out;
    }
    const auto& below = levels[static_cast<std::size_t>(K) - 1];
    const auto cheb = [](std::size_t j, std::size_t n) { return -std::cos(std::numbers::pi * j / n); };
    const std::size_t n_top = top.size() - 1, n_below = below.size() - 1;
    for (std::size_t j = 0; j < top.size(); ++j) {
        const double image = p(Complex(top[j])).real();
        const auto it = std::min_element(below.begin(), below.end(),
                                         [&](double a, double b) { return std::abs(a - image) < std::abs(b - image); });
        const double h_image = cheb(static_cast<std::size_t>(it - below.begin()), n_below);
        const double c = cheb(j, n_top);
        out.residual = std::max(out.residual, std::abs(2.0 * c * c - 1.0 - h_image));
    }
    return out;
}

/// max |q(Pi(z)) - Pi(G(z))| over `samples` equally spaced points of |z| = 1.
inline double semiconjugacy_error(const LiftedSystem& sys, int samples = 10000) {
    double err = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * (i + 0.5) / samples);
        err = std::max(err, std::abs(sys.q(zhukovsky(z)) - zhukovsky(sys.G(z))));
    }
    return err;
}

struct TransferCheck {
    Complex x;
    int n;
    double lhs, rhs, relative_error;
};

inline constexpr double kRamificationCollar = 1e-9;

/// lhs = sum_{F^n(y)=x} |(F^n)'(y)|^{-1} by brute force over the preimage
/// tree of F; rhs = |Pi'(w)|^{-1} sum_{G^n(v)=w} |Pi'(v)| / |(G^n)'(v)| with
/// w the preimage of A(x) under Pi inside the unit disc.
inline TransferCheck verify_transfer_identity(const LiftedSystem& sys, Complex x, int n) {
    const PreimageTree tree = preimage_tree(sys.original, x, n);
    if (tree.near_critical) throw RamificationHit("a preimage of x is a critical point of F");
    const double lhs = std::exp(log_derivative_sum(tree.leaves(), 1.0));

    const Complex w = zhukovsky_inverse(sys.A(x));
    std::vector<std::pair<Complex, double>> current{{w, 0.0}}; // (v, log |(G^j)'(v)|)
    for (int j = 0; j < n; ++j) {
        std::vector<std::pair<Complex, double>> next;
        for (const auto& [u, ld] : current)
            for (const Complex v : sys.G_preimages(u)) next.push_back({v, ld + std::log(sys.G_derivative_modulus(v))});
        current = std::move(next);
    }
    std::vector<double> terms;
    for (const auto& [v, ld] : current) {
        if (std::abs(v - 1.0) < kRamificationCollar || std::abs(v + 1.0) < kRamificationCollar)
            throw RamificationHit("a lifted preimage is within 1e-9 of a ramification point");
        terms.push_back(std::abs(zhukovsky_derivative(v)) * std::exp(-ld));
    }
    const double rhs = ordered_sum(std::move(terms)) / std::abs(zhukovsky_derivative(w));
    return {x, n, lhs, rhs, std::abs(lhs - rhs) / std::abs(rhs)};
}

/// sum_{G^n(v)=w} |(G^n)'(v)|^{-1}; equal to 1 on |w| = 1 for G = +-z^k.
inline double circle_sum(const LiftedSystem& sys, Complex w, int n) {
    std::vector<std::pair<Complex, double>> current{{w, 1.0}};
    for (int j = 0; j < n; ++j) {
        std::vector<std::pair<Complex, double>> next;
        for (const auto& [u, dv] : current)
            for (const Complex v : sys.G_preimages(u)) next.push_back({v, dv * sys.G_derivative_modulus(v)});
        current = std::move(next);
    }
    std::vector<double> terms;
    for (const auto& [v, dv] : current) terms.push_back(1.0 / dv);
    return ordered_sum(std::move(terms));
}

/// The quadratic Chebyshev system z^2 - 2 on [-2, 2].
inline LiftedSystem chebyshev_quadratic_system() { return normalize_to_chebyshev(Polynomial{-2.0, 0.0, 1.0}, -2.0, 2.0); }

} // namespace polydyn

#endif // POLYDYN_CHEBYSHEV_LIFT_HPP
