#ifndef POLYDYN_PRESSURE_HPP
#define POLYDYN_PRESSURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "polydyn/components.hpp"
#include "polydyn/double_double.hpp"
#include "polydyn/error.hpp"
#include "polydyn/escape.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/polynomial.hpp"
#include "polydyn/summation.hpp"

namespace polydyn {

enum class Precision { Double, DoubleDouble };

inline constexpr double kCriticalLeafThreshold = 1e-12;
inline constexpr double kPostCriticalDistance = 1e-6;

struct Leaf {
    Complex point;
    double log_derivative; ///< log |(f^k)'(point)|; -inf on a critical point
    double weight;         ///< product of root multiplicities along the branch
};

struct TreeOptions {
    double tol = 1e-10;
    std::size_t leaf_cap = 2'000'000;
    int threads = 0;
    Precision precision = Precision::Double;
};

/// f^{-k}(x) for k = 0..n with derivative moduli. levels[k] is ordered by
/// parent, then by the root order of `roots` (argument, then modulus).
struct PreimageTree {
    Complex base;
    std::vector<std::vector<Leaf>> levels;
    bool near_critical = false; ///< some step had |f'(w)| < kCriticalLeafThreshold

    int depth() const { return static_cast<int>(levels.size()) - 1; }
    const std::vector<Leaf>& leaves() const { return levels.back(); }
    double leaf_count(int k) const {
        double s = 0.0;
        for (const auto& l : levels[static_cast<std::size_t>(k)]) s += l.weight;
        return s;
    }
};

namespace detail {

struct Node {
    Leaf leaf;
    ComplexDD precise; ///< used in double-double mode
};

/// Expands one level. `keep` decides which preimages survive.
template <class Keep>
std::vector<Node> expand_level(const Polynomial& p, const std::vector<Node>& current, int level,
                               const TreeOptions& opt, Keep&& keep, bool& near_critical) {
    std::vector<std::vector<Node>> slots(current.size());
    std::vector<char> critical(current.size(), 0);
    parallel_for(current.size(), opt.threads, [&](std::size_t i) {
        const Node& node = current[i];
        const Complex target = node.leaf.point;
        std::vector<Root> found;
        try {
            found = roots(p.minus_constant(target), opt.tol);
        } catch (const NonConvergence& e) {
            throw RootFailure(std::string("level ") + std::to_string(level) + ": " + e.what());
        }
        for (const auto& r : found) {
            Node child;
            if (opt.precision == Precision::DoubleDouble) {
                child.precise = polish_preimage(p, node.precise, ComplexDD(r.z));
                child.leaf.point = child.precise.to_complex();
            } else {
                child.leaf.point = r.z;
                child.precise = ComplexDD(r.z);
            }
            const double slope = std::abs(p.value_and_derivative(child.leaf.point).second);
            if (slope < kCriticalLeafThreshold) critical[i] = 1;
            child.leaf.log_derivative = node.leaf.log_derivative + std::log(slope);
            child.leaf.weight = node.leaf.weight * r.multiplicity;
            if (keep(child.leaf.point, level)) slots[i].push_back(child);
        }
    });
    std::vector<Node> next;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (critical[i]) near_critical = true;
        next.insert(next.end(), slots[i].begin(), slots[i].end());
    }
    return next;
}

template <class Keep>
PreimageTree build_tree(const Polynomial& p, Complex x, int n, const TreeOptions& opt, Keep&& keep) {
    if (n < 0) throw std::invalid_argument("preimage_tree: n < 0");
    PreimageTree tree;
    tree.base = x;
    std::vector<Node> current{{Leaf{x, 0.0, 1.0}, ComplexDD(x)}};
    tree.levels.push_back({current.front().leaf});
    for (int k = 1; k <= n; ++k) {
        if (current.size() * static_cast<std::size_t>(p.degree()) > opt.leaf_cap)
            throw LeafBudgetExceeded("level " + std::to_string(k) + " would exceed " + std::to_string(opt.leaf_cap) +
                                     " leaves");
        current = expand_level(p, current, k, opt, keep, tree.near_critical);
        std::vector<Leaf> level;
        level.reserve(current.size());
        for (const auto& node : current) level.push_back(node.leaf);
        tree.levels.push_back(std::move(level));
        if (current.empty()) break;
    }
    return tree;
}

} // namespace detail

/// Full preimage tree of depth n.
inline PreimageTree preimage_tree(const Polynomial& p, Complex x, int n, const TreeOptions& opt = {}) {
    if (std::pow(static_cast<double>(p.degree()), n) > static_cast<double>(opt.leaf_cap))
        throw LeafBudgetExceeded("d^n exceeds the leaf cap " + std::to_string(opt.leaf_cap));
    return detail::build_tree(p, x, n, opt, [](Complex, int) { return true; });
}

/// Throws PostCriticalBase if x lies within kPostCriticalDistance of
/// f^k(c) for a critical point c and 1 <= k <= n.
inline void validate_base_point(const Polynomial& p, Complex x, int n) {
    for (const auto& c : critical_points(p)) {
        Complex z = c.z;
        for (int k = 1; k <= n; ++k) {
            z = p(z);
            if (!std::isfinite(std::abs(z))) break;
            if (std::abs(z - x) < kPostCriticalDistance)
                throw PostCriticalBase("base point is within 1e-6 of f^" + std::to_string(k) + " of a critical point");
        }
    }
}

/// log sum_{v in level k} weight(v) |(f^k)'(v)|^{-t}.
inline double log_derivative_sum(const std::vector<Leaf>& leaves, double t) {
    std::vector<double> exponents(leaves.size()), weights(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        // t = 0 weighs every leaf by 1, critical ones included
        exponents[i] = t == 0.0 ? 0.0 : -t * leaves[i].log_derivative;
        weights[i] = leaves[i].weight;
    }
    return log_sum_exp(exponents, weights);
}

/// Pressure sequence at one t.
///
/// rates[n-1] = (1/n) log S_n is the literal finite-n pressure. Its error
/// carries an O(1/n) term from the base-point prefactor, so the estimate is
/// extrapolated from the increments log S_n - log S_{n-1} (S_0 = 1), which
/// have the same limit.
struct PressureEstimate {
    double t = 0.0;
    Complex base;
    std::vector<double> log_sums;   ///< log S_n, n = 1..N
    std::vector<double> rates;      ///< (1/n) log S_n
    std::vector<double> increments; ///< log S_n - log S_{n-1}
    std::vector<double> leaves;     ///< leaf count with multiplicity per level
    bool near_critical = false;
    double value = 0.0;       ///< mean of the last 3 increments
    double dispersion = 0.0;  ///< max - min of the last 3 increments
    double rate_value = 0.0;  ///< mean of the last 3 rates
    double rate_dispersion = 0.0;

    int depth() const { return static_cast<int>(log_sums.size()); }
};

namespace detail {

inline void tail_stats(const std::vector<double>& seq, double& mean, double& spread) {
    const std::size_t k = std::min<std::size_t>(3, seq.size());
    if (k == 0) {
        mean = spread = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (std::size_t i = seq.size() - k; i < seq.size(); ++i) {
        lo = std::min(lo, seq[i]);
        hi = std::max(hi, seq[i]);
        sum += seq[i];
    }
    mean = sum / static_cast<double>(k);
    spread = hi - lo;
}

} // namespace detail

inline PressureEstimate pressure_from_tree(const PreimageTree& tree, double t) {
    if (tree.near_critical && t > 0.0)
        throw NearCriticalValue("a preimage lies on a critical point; choose a base point off the post-critical set");
    PressureEstimate est;
    est.t = t;
    est.base = tree.base;
    est.near_critical = tree.near_critical;
    double previous = 0.0;
    for (int n = 1; n <= tree.depth(); ++n) {
        const double s = log_derivative_sum(tree.levels[static_cast<std::size_t>(n)], t);
        est.log_sums.push_back(s);
        est.rates.push_back(s / n);
        est.increments.push_back(s - previous);
        est.leaves.push_back(tree.leaf_count(n));
        previous = s;
    }
    detail::tail_stats(est.increments, est.value, est.dispersion);
    detail::tail_stats(est.rates, est.rate_value, est.rate_dispersion);
    return est;
}

inline PressureEstimate pressure_estimate(const Polynomial& p, double t, Complex x, int n,
                                          const TreeOptions& opt = {}) {
    if (n < 1) throw std::invalid_argument("pressure_estimate: depth must be at least 1");
    validate_base_point(p, x, n);
    return pressure_from_tree(preimage_tree(p, x, n, opt), t);
}

struct BowenZero {
    double t;        ///< midpoint of the final bracket
    double lo, hi;   ///< bracket with P(lo) > 0 >= P(hi)
    int depth;
    int iterations;
};

/// Bisection for the sign change of the depth-N extrapolated pressure.
inline BowenZero bowen_zero(const PreimageTree& tree, double t_lo, double t_hi, double tol_t = 1e-3) {
    const auto pressure = [&](double t) { return pressure_from_tree(tree, t).value; };
    double lo = t_lo, hi = t_hi;
    const double p_lo = pressure(lo), p_hi = pressure(hi);
    if (!(p_lo > 0.0 && p_hi <= 0.0))
        throw NoBracket("pressure does not change sign on [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                        "]: P(lo) = " + std::to_string(p_lo) + ", P(hi) = " + std::to_string(p_hi));
    int iterations = 0;
    while (hi - lo > tol_t) {
        const double mid = 0.5 * (lo + hi);
        if (pressure(mid) > 0.0) lo = mid;
        else hi = mid;
        ++iterations;
    }
    return {0.5 * (lo + hi), lo, hi, tree.depth(), iterations};
}

inline BowenZero bowen_zero(const Polynomial& p, Complex x, int n, double t_lo, double t_hi, double tol_t = 1e-3,
                            const TreeOptions& opt = {}) {
    validate_base_point(p, x, n);
    return bowen_zero(preimage_tree(p, x, n, opt), t_lo, t_hi, tol_t);
}

/// Restricted sums L_k(F, x) = log sum_{F^k(y) = x} |(F^k)'(y)|^{-1}, k = 1..n,
/// where every preimage must satisfy `inside`. EmptyTree when everything is
/// pruned.
template <class Inside>
std::vector<double> restricted_sums(const Polynomial& p, Complex x, int n, Inside&& inside,
                                    const TreeOptions& opt = {}) {
    const PreimageTree tree = detail::build_tree(p, x, n, opt, [&](Complex z, int) { return inside(z); });
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) {
        if (k > tree.depth() || tree.levels[static_cast<std::size_t>(k)].empty())
            throw EmptyTree("all preimages pruned at level " + std::to_string(k));
        out.push_back(log_derivative_sum(tree.levels[static_cast<std::size_t>(k)], 1.0));
    }
    return out;
}

/// L_k(F, x) for F = f on U_{m+1} with a one-pixel tolerance collar.
inline std::vector<double> restricted_Ln(const DynSetup& setup, const PolyLikeRestriction& restriction, Complex x,
                                         int n, Collar collar = Collar::Dilated, const TreeOptions& opt = {}) {
    return restricted_sums(setup.p, x, n, [&](Complex z) { return restriction.in_inner(z, collar); }, opt);
}

struct C0Estimate {
    double C0 = 0.0;
    double min_L = 0.0;           ///< min over samples and n of L_n
    Complex argmin_x;
    int argmin_n = 0;
    std::vector<double> min_by_n; ///< min over samples of L_n, n = 1..n_max
    std::size_t samples = 0;
};

/// C0 = max(0, -min L_n(F, x)) over the samples and n <= n_max.
inline C0Estimate estimate_C0(const DynSetup& setup, const PolyLikeRestriction& restriction,
                              const std::vector<Complex>& samples, int n_max, const TreeOptions& opt = {}) {
    if (samples.size() < 20) throw std::invalid_argument("estimate_C0: need at least 20 samples");
    std::vector<std::vector<double>> per_sample(samples.size());
    TreeOptions inner = opt;
    inner.threads = 1;
    parallel_for(samples.size(), opt.threads, [&](std::size_t i) {
        per_sample[i] = restricted_Ln(setup, restriction, samples[i], n_max, Collar::Dilated, inner);
    });
    C0Estimate out;
    out.samples = samples.size();
    out.min_L = std::numeric_limits<double>::infinity();
    out.min_by_n.assign(static_cast<std::size_t>(n_max), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (int n = 1; n <= n_max; ++n) {
            const double L = per_sample[i][static_cast<std::size_t>(n - 1)];
            auto& slot = out.min_by_n[static_cast<std::size_t>(n - 1)];
            slot = std::min(slot, L);
            if (L < out.min_L) {
                out.min_L = L;
                out.argmin_x = samples[i];
                out.argmin_n = n;
            }
        }
    out.C0 = std::max(0.0, -out.min_L);
    return out;
}

/// Sample protocol for C0 and a: Halton points in the eroded U_m away from
/// the dilated deepest chain component (the current approximation of C).
inline std::vector<Complex> sample_outer_domain(const ComponentChain& chain, const PolyLikeRestriction& restriction,
                                                std::size_t count) {
    const LevelGrid& deepest = chain.grid(chain.max_level());
    return sample_component(restriction.outer_grid(), restriction.outer_label, &deepest,
                            chain.labels[static_cast<std::size_t>(chain.max_level())], count);
}

} // namespace polydyn

#endif // POLYDYN_PRESSURE_HPP
