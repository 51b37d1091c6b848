#ifndef POLYDYN_LOWERBOUND_HPP
#define POLYDYN_LOWERBOUND_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "polydyn/components.hpp"
#include "polydyn/error.hpp"
#include "polydyn/escape.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/pressure.hpp"
#include "polydyn/summation.hpp"

namespace polydyn {

/// Free branch system on U_0 := U_m. An h-block pulls a point of U_0 back
/// N1 steps into V; an F-step pulls it back one step into U_1 := U_{m+1}.
/// Intermediate membership uses `collar`; Eroded prunes whenever a pixel
/// neighbourhood is not entirely inside, which can only lower the sums.
struct BranchSystem {
    const DynSetup* setup = nullptr;
    PolyLikeRestriction F;
    VBranch V;
    Collar collar = Collar::Eroded;
    double tol = 1e-10;

    std::vector<BranchPoint> h(Complex x) const { return v_preimages(setup->p, V, x, collar, tol); }

    std::vector<BranchPoint> F_inverse(Complex x) const {
        std::vector<BranchPoint> out;
        for (const auto& r : roots(setup->p.minus_constant(x), tol))
            if (F.in_inner(r.z, collar))
                out.push_back({r.z, std::log(std::abs(setup->p.value_and_derivative(r.z).second))});
        return out;
    }

    /// Time in f-steps of a composition with k blocks and total length N.
    int f_time(int N, int k) const { return N + k * (V.level - 1); }
};

/// sum |h'(x)| over the inverse branches of f^{N1} into V.
inline double branch_weight(const BranchSystem& sys, Complex x) {
    const auto pre = sys.h(x);
    if (pre.empty()) throw EmptyBranch("no preimage of x lands in V");
    std::vector<double> terms;
    for (const auto& b : pre) terms.push_back(std::exp(-b.log_derivative));
    return ordered_sum(std::move(terms));
}

struct AMeasure {
    double a = 0.0;
    Complex argmin;
    std::vector<double> per_sample;
};

inline AMeasure measure_a(const BranchSystem& sys, const std::vector<Complex>& samples, int threads = 0) {
    if (samples.size() < 20) throw std::invalid_argument("measure_a: need at least 20 samples");
    AMeasure out;
    out.per_sample.resize(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) { out.per_sample[i] = branch_weight(sys, samples[i]); });
    const auto it = std::min_element(out.per_sample.begin(), out.per_sample.end());
    out.a = *it;
    out.argmin = samples[static_cast<std::size_t>(it - out.per_sample.begin())];
    return out;
}

/// sum_k C(N-1, k-1) c^k, which equals c (1 + c)^{N-1}.
inline double binomial_bound(int N, double c) {
    double sum = 0.0, binom = 1.0;
    for (int k = 1; k <= N; ++k) {
        sum += binom * std::pow(c, k);
        binom = binom * (N - k) / k;
    }
    return sum;
}

struct LambdaRecord {
    Complex x;
    int N = 0;
    double lambda = 0.0;                   ///< Lambda_N(x)
    std::vector<double> by_blocks;         ///< index k = number of blocks (0 unused)
    std::map<int, double> by_f_time;       ///< contributions grouped by f-time
    std::size_t branches = 0;
    double a = 0.0, b = 0.0;
    double bound = 0.0;                    ///< sum_k C(N-1,k-1) (ab)^k
    double closed_form = 0.0;              ///< ab (1+ab)^{N-1}
    bool certificate = false;              ///< lambda >= bound (1 - 1e-9)
    std::vector<std::pair<Complex, double>> endpoints; ///< (point, log derivative), kept when requested
};

namespace detail {

struct LambdaAccumulator {
    std::vector<std::vector<double>> by_blocks;
    std::map<int, std::vector<double>> by_f_time;
    std::size_t branches = 0;
    std::vector<std::pair<Complex, double>> endpoints;
    bool keep_endpoints = false;
};

inline void enumerate_blocks(const BranchSystem& sys, Complex z, double log_derivative, int remaining, int blocks,
                             int f_time, LambdaAccumulator& acc);

/// Continues a block whose h-step produced `hb`: l = 0, 1, ... F-steps,
/// each ending the block and either closing the composition or starting
/// the next block.
inline void enumerate_from_branch(const BranchSystem& sys, const BranchPoint& hb, int remaining, int blocks, int f_time,
                                  LambdaAccumulator& acc) {
    std::vector<BranchPoint> layer{hb};
    int time = f_time + sys.V.level;
    for (int l = 0; l < remaining && !layer.empty(); ++l) {
        const int left = remaining - 1 - l;
        for (const auto& node : layer) {
            if (left == 0) {
                const double term = std::exp(-node.log_derivative);
                acc.by_blocks[static_cast<std::size_t>(blocks)].push_back(term);
                acc.by_f_time[time].push_back(term);
                ++acc.branches;
                if (acc.keep_endpoints) acc.endpoints.push_back({node.point, node.log_derivative});
            } else {
                enumerate_blocks(sys, node.point, node.log_derivative, left, blocks, time, acc);
            }
        }
        if (l + 1 < remaining) {
            std::vector<BranchPoint> next;
            for (const auto& node : layer)
                for (const auto& fb : sys.F_inverse(node.point))
                    next.push_back({fb.point, node.log_derivative + fb.log_derivative});
            layer = std::move(next);
            ++time;
        }
    }
}

/// Starts block number blocks + 1 at z with `remaining` length left.
inline void enumerate_blocks(const BranchSystem& sys, Complex z, double log_derivative, int remaining, int blocks,
                             int f_time, LambdaAccumulator& acc) {
    for (const auto& hb : sys.h(z))
        enumerate_from_branch(sys, {hb.point, log_derivative + hb.log_derivative}, remaining, blocks + 1, f_time, acc);
}

} // namespace detail

/// Lambda_N(x) = sum over compositions with total length N of |phi'(x)|.
/// Parallel over the first h-branch; the reduction is ordered.
inline LambdaRecord lambda_N(const BranchSystem& sys, Complex x, int N, double a, double b, bool keep_endpoints = false,
                             int threads = 0) {
    if (N < 1) throw std::invalid_argument("lambda_N: N must be at least 1");
    const auto first = sys.h(x);
    if (first.empty()) throw EmptyBranch("no preimage of x lands in V");
    std::vector<detail::LambdaAccumulator> parts(first.size());
    parallel_for(first.size(), threads, [&](std::size_t i) {
        auto& acc = parts[i];
        acc.keep_endpoints = keep_endpoints;
        acc.by_blocks.resize(static_cast<std::size_t>(N) + 1);
        detail::enumerate_from_branch(sys, first[i], N, 1, 0, acc);
    });

    LambdaRecord rec;
    rec.x = x;
    rec.N = N;
    rec.a = a;
    rec.b = b;
    rec.by_blocks.assign(static_cast<std::size_t>(N) + 1, 0.0);
    std::vector<std::vector<double>> blocks(static_cast<std::size_t>(N) + 1);
    std::map<int, std::vector<double>> times;
    for (auto& part : parts) {
        for (std::size_t k = 0; k < part.by_blocks.size(); ++k)
            blocks[k].insert(blocks[k].end(), part.by_blocks[k].begin(), part.by_blocks[k].end());
        for (auto& [t, terms] : part.by_f_time) times[t].insert(times[t].end(), terms.begin(), terms.end());
        rec.branches += part.branches;
        rec.endpoints.insert(rec.endpoints.end(), part.endpoints.begin(), part.endpoints.end());
    }
    std::vector<double> all;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        rec.by_blocks[k] = ordered_sum(blocks[k]);
        all.insert(all.end(), blocks[k].begin(), blocks[k].end());
    }
    for (auto& [t, terms] : times) rec.by_f_time[t] = ordered_sum(terms);
    rec.lambda = ordered_sum(std::move(all));
    rec.bound = binomial_bound(N, a * b);
    rec.closed_form = a * b * std::pow(1.0 + a * b, N - 1);
    rec.certificate = rec.lambda >= rec.bound * (1.0 - 1e-9);
    return rec;
}

/// Pairwise distinctness of composition endpoints: no two share a point
/// (within `merge`) and a derivative (within `merge` relative).
inline bool endpoints_distinct(const LambdaRecord& rec, double merge = 1e-9) {
    auto pts = rec.endpoints;
    std::sort(pts.begin(), pts.end(), [](const auto& u, const auto& v) {
        if (u.first.real() != v.first.real()) return u.first.real() < v.first.real();
        return u.first.imag() < v.first.imag();
    });
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size() && pts[j].first.real() - pts[i].first.real() <= merge; ++j)
            if (std::abs(pts[j].first - pts[i].first) <= merge &&
                std::abs(pts[j].second - pts[i].second) <= merge * std::max(1.0, std::abs(pts[i].second)))
                return false;
    return true;
}

struct PressureLowerBound {
    double a = 0.0, C0 = 0.0, b = 0.0;
    double asymptote = 0.0;       ///< log(1 + ab), per unit of composition length
    double f_time_bound = 0.0;    ///< log(1 + ab) / N1, per f-step
    double min_rate = 0.0;        ///< min over samples of (1/N) log Lambda_N(x)
    Complex argmin;
    std::vector<LambdaRecord> records;
    bool all_certified = false;
};

/// Evidence that P(1, f) > 0: the measured a (infimum over the a-samples),
/// b = exp(-C0) and Lambda_N at each of `samples`. A composition of length N
/// spans at most N * N1 steps of f, so a positive growth rate of Lambda_N per
/// unit length gives at least that rate divided by N1 per f-step.
inline PressureLowerBound pressure_one_lower_bound(const BranchSystem& sys, const AMeasure& am,
                                                   const std::vector<Complex>& samples, int N, double C0,
                                                   int threads = 0) {
    PressureLowerBound out;
    out.a = am.a;
    out.C0 = C0;
    out.b = std::exp(-C0);
    out.asymptote = std::log1p(out.a * out.b);
    out.f_time_bound = out.asymptote / sys.V.level;
    out.min_rate = std::numeric_limits<double>::infinity();
    out.all_certified = true;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        LambdaRecord rec = lambda_N(sys, samples[i], N, out.a, out.b, false, threads);
        const double rate = std::log(rec.lambda) / N;
        if (rate < out.min_rate) {
            out.min_rate = rate;
            out.argmin = samples[i];
        }
        out.all_certified = out.all_certified && rec.certificate;
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace polydyn

#endif // POLYDYN_LOWERBOUND_HPP
