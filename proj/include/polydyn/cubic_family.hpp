#ifndef POLYDYN_CUBIC_FAMILY_HPP
#define POLYDYN_CUBIC_FAMILY_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "polydyn/chebyshev_lift.hpp"
#include "polydyn/components.hpp"
#include "polydyn/error.hpp"
#include "polydyn/escape.hpp"
#include "polydyn/polynomial.hpp"

namespace polydyn {

/// eps z^3 + z^2 - beta (quadratic when eps = 0).
inline Polynomial cubic_map(double eps, double beta) { return Polynomial{-beta, 0.0, 1.0, eps}; }

/// The real repelling fixed point near 2, by Newton from z = 2.
inline double fixed_point_near_2(double eps, double beta) {
    if (!(std::abs(eps) < 0.2 && std::abs(beta - 2.0) < 0.5))
        throw std::invalid_argument("fixed_point_near_2: (eps, beta) outside the neighbourhood of (0, 2)");
    double z = 2.0;
    bool converged = false;
    for (int i = 0; i < 100; ++i) {
        const double g = ((eps * z + 1.0) * z - 1.0) * z - beta;
        const double dg = (3.0 * eps * z + 2.0) * z - 1.0;
        if (g == 0.0) {
            converged = true;
            break;
        }
        const double step = g / dg;
        z -= step;
        if (!std::isfinite(z)) break;
        if (std::abs(step) <= 1e-15 * std::abs(z)) {
            converged = true;
            break;
        }
    }
    if (!converged || std::abs(z - 2.0) > 1.0) throw NewtonDiverged("fixed point iteration from z = 2 did not converge");
    const double multiplier = (3.0 * eps * z + 2.0) * z;
    if (!(std::abs(multiplier) > 1.0)) throw NotRepelling("|f'(p)| = " + std::to_string(std::abs(multiplier)));
    return z;
}

/// f^2(0) = f(-beta) = -eps beta^3 + beta^2 - beta.
inline double gamma_value(double eps, double beta) { return ((-eps * beta + 1.0) * beta - 1.0) * beta; }

inline double gamma_residual(double eps, double beta) { return gamma_value(eps, beta) - fixed_point_near_2(eps, beta); }

struct Gradient {
    double d_eps;
    double d_beta;
};

/// Central differences with step h.
template <class Fn>
Gradient central_gradient(Fn&& fn, double eps, double beta, double h = 1e-6) {
    return {(fn(eps + h, beta) - fn(eps - h, beta)) / (2.0 * h), (fn(eps, beta + h) - fn(eps, beta - h)) / (2.0 * h)};
}

inline Gradient gamma_gradient(double eps, double beta, double h = 1e-6) {
    return central_gradient(gamma_value, eps, beta, h);
}

inline Gradient fixed_point_gradient(double eps, double beta, double h = 1e-6) {
    return central_gradient(fixed_point_near_2, eps, beta, h);
}

struct FamilyPoint {
    double eps = 0.0;
    double beta = 0.0;
    double p = 0.0;
    double residual = 0.0;   ///< |f^2(0) - p| with f^2(0) evaluated by iterating f
    double multiplier = 0.0; ///< f'(p)
    bool on_gamma = false;
};

inline FamilyPoint family_point(double eps, double beta, double tol = 1e-11) {
    FamilyPoint fp;
    fp.eps = eps;
    fp.beta = beta;
    fp.p = fixed_point_near_2(eps, beta);
    const Polynomial f = cubic_map(eps, beta);
    fp.residual = std::abs(f(f(Complex(0.0))).real() - fp.p);
    fp.multiplier = (3.0 * eps * fp.p + 2.0) * fp.p;
    fp.on_gamma = fp.residual < tol;
    return fp;
}

inline constexpr double kContinuationStep = 0.005;
inline constexpr double kContinuationRange = 0.15;

namespace detail {

/// Newton in beta on gamma - p, started at beta0.
inline double gamma_newton(double eps, double beta0, double tol) {
    double beta = beta0;
    for (int i = 0; i < 60; ++i) {
        const double p = fixed_point_near_2(eps, beta);
        const double g = gamma_value(eps, beta) - p;
        if (std::abs(g) <= tol) return beta;
        // d(gamma)/d(beta) - dp/d(beta), with dp/d(beta) = 1 / (3 eps p^2 + 2p - 1)
        const double dg = (-3.0 * eps * beta + 2.0) * beta - 1.0 - 1.0 / ((3.0 * eps * p + 2.0) * p - 1.0);
        const double step = g / dg;
        beta -= step;
        if (!std::isfinite(beta)) break;
        if (std::abs(step) <= 1e-15 * std::abs(beta)) return beta;
    }
    throw NewtonDiverged("Newton on the curve did not reach tolerance at eps = " + std::to_string(eps));
}

} // namespace detail

/// beta(eps) on the curve f^2(0) = p, continued from (0, 2) in steps of
/// kContinuationStep with warm-started Newton.
inline FamilyPoint gamma_solve(double eps, double tol = 1e-13) {
    if (!(std::abs(eps) < kContinuationRange))
        throw NewtonDiverged("eps = " + std::to_string(eps) + " is outside the continuation range");
    const int steps = static_cast<int>(std::ceil(std::abs(eps) / kContinuationStep - 1e-9));
    double beta = 2.0;
    for (int i = 1; i <= steps; ++i) {
        const double e = i == steps ? eps : std::copysign(kContinuationStep * i, eps);
        beta = detail::gamma_newton(e, beta, tol);
    }
    return family_point(eps, beta);
}

/// Samples eps = lo, lo + step, ..., hi continued sequentially from (0, 2).
inline std::vector<FamilyPoint> curve(double lo, double hi, double step, double tol = 1e-13) {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("curve: need lo <= hi and step > 0");
    std::vector<FamilyPoint> out;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    double beta = gamma_solve(lo, tol).beta;
    for (int i = 0; i < count; ++i) {
        const double eps = lo + step * i;
        if (!(std::abs(eps) < kContinuationRange))
            throw NewtonDiverged("eps = " + std::to_string(eps) + " is outside the continuation range");
        // substeps keep every Newton start within kContinuationStep of the last point
        if (i > 0) {
            const double prev = lo + step * (i - 1);
            const int sub = std::max(1, static_cast<int>(std::ceil(step / kContinuationStep - 1e-9)));
            for (int s = 1; s <= sub; ++s) beta = detail::gamma_newton(prev + (eps - prev) * s / sub, beta, tol);
        }
        out.push_back(family_point(eps, beta));
    }
    return out;
}

/// dbeta/deps on the curve by implicit differentiation of gamma - p, with
/// both gradients taken by central differences.
inline double curve_slope(double eps, double beta, double h = 1e-6) {
    const Gradient g = gamma_gradient(eps, beta, h);
    const Gradient p = fixed_point_gradient(eps, beta, h);
    return -(g.d_eps - p.d_eps) / (g.d_beta - p.d_beta);
}

enum class CheckStatus { Pass, Fail, NotApplicable };

inline const char* to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "n/a";
    }
    return "?";
}

struct ExampleCheck {
    std::string id;
    std::string description;
    CheckStatus status;
    std::vector<std::pair<std::string, double>> measured;
    std::string note;
};

struct ExampleOptions {
    double half_width = 5.0;
    int resolution = 2048;
    int level = 10;
    double pitch_budget = 3.0;
    int m_cap = 12;
    int threads = 0;
};

struct ExampleReport {
    FamilyPoint point;
    double radius = 0.0;
    std::vector<ExampleCheck> checks;
    std::vector<double> hausdorff_pitches; ///< per level; negative where the component is clipped
    int poly_like_level = -1;
    int degree = 0;

    bool all_pass() const {
        return std::none_of(checks.begin(), checks.end(), [](const ExampleCheck& c) { return c.status == CheckStatus::Fail; });
    }
};

/// Checks (a)-(g) for the interval component I = [-beta, p] of f_{eps, beta(eps)}.
inline ExampleReport verify_example(double eps, const ExampleOptions& opt = {}) {
    if (eps < 0.0 || eps > 0.15) throw std::invalid_argument("verify_example: eps must lie in [0, 0.15]");
    ExampleReport report;
    report.point = gamma_solve(eps);
    const double beta = report.point.beta, p = report.point.p;
    const Polynomial f = cubic_map(eps, beta);
    const DynSetup setup(f);
    report.radius = setup.radius;
    const auto status = [](bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; };
    const auto fr = [&](double x) { return f(Complex(x)).real(); };

    {
        const double err = std::abs(fr(0.0) + beta);
        report.checks.push_back({"a", "f(0) = -beta", status(err <= 1e-14 * beta), {{"abs_error", err}}, ""});
    }
    {
        // extrema of f on I: endpoints and critical points inside I
        double lo = std::min(fr(-beta), fr(p)), hi = std::max(fr(-beta), fr(p));
        std::vector<double> interior;
        for (const auto& c : critical_points(f))
            if (std::abs(c.z.imag()) < 1e-12 && c.z.real() > -beta && c.z.real() < p) interior.push_back(c.z.real());
        for (const double c : interior) {
            lo = std::min(lo, fr(c));
            hi = std::max(hi, fr(c));
        }
        const double excess = std::max(0.0, std::max(-beta - lo, hi - p));
        report.checks.push_back({"b", "f(I) within I", status(excess < 1e-11),
                                 {{"min_image", lo}, {"max_image", hi}, {"excess", excess}}, ""});
        const bool one = interior.size() == 1 && std::abs(interior.front()) < 1e-12;
        report.checks.push_back({"c", "one critical point (0) inside I", status(one),
                                 {{"critical_points_inside", static_cast<double>(interior.size())}}, ""});
    }
    if (eps == 0.0) {
        report.checks.push_back({"d", "second critical point escapes", CheckStatus::NotApplicable, {},
                                 "quadratic map, single critical point"});
        report.checks.push_back({"e", "Julia set disconnected", CheckStatus::NotApplicable, {}, "quadratic Chebyshev map"});
    } else {
        const double c = -2.0 / (3.0 * eps);
        double z = c;
        bool increasing = fr(c) > p;
        z = fr(c);
        int steps = 1;
        while (increasing && std::abs(z) <= setup.radius && steps < 1000) {
            const double next = fr(z);
            increasing = next > z;
            z = next;
            ++steps;
        }
        const OrbitClass oc = classify(setup, Complex(c));
        report.checks.push_back({"d", "f(c) > p and c escapes", status(fr(c) > p && increasing && oc.escaped()),
                                 {{"c", c}, {"f_c", fr(c)}, {"escape_step", static_cast<double>(oc.steps)}}, ""});
        const auto conn = connectivity_class(setup);
        report.checks.push_back({"e", "Julia set disconnected", status(conn.kind == Connectivity::Disconnected), {},
                                 to_string(conn.kind)});
    }

    const Frame frame = Frame::real_axis_aligned(opt.half_width, opt.resolution);
    const auto chain = component_chain(setup, 0.0, opt.level, frame, opt.threads);
    {
        bool decreasing = true;
        double previous = -1.0;
        for (int n = 0; n <= opt.level; ++n) {
            const LevelGrid& g = chain.grid(n);
            const int label = chain.labels[static_cast<std::size_t>(n)];
            if (g.info(label).touches_border) {
                report.hausdorff_pitches.push_back(-1.0);
                continue;
            }
            const double d = hausdorff_to_real_segment(g, label, -beta, p) / frame.pitch();
            if (previous >= 0.0 && d > previous) decreasing = false;
            previous = d;
            report.hausdorff_pitches.push_back(d);
        }
        const double last = report.hausdorff_pitches.back();
        report.checks.push_back({"f", "seed-0 component chain converges to I",
                                 status(last >= 0.0 && last < opt.pitch_budget && decreasing && chain.all_nested()),
                                 {{"hausdorff_pitches", last}, {"pitch", frame.pitch()}, {"level", static_cast<double>(opt.level)}},
                                 decreasing ? "non-increasing over unclipped levels" : "distance increased between levels"});
    }
    try {
        const PolyLikeRestriction r = find_poly_like(setup, chain, 1, opt.m_cap);
        report.poly_like_level = r.level;
        report.degree = r.degree;
        report.checks.push_back({"g", "polynomial-like degree 2", status(r.degree == 2 && r.degree <= f.degree()),
                                 {{"degree", static_cast<double>(r.degree)},
                                  {"level", static_cast<double>(r.level)},
                                  {"ambient_degree", static_cast<double>(f.degree())}},
                                 ""});
    } catch (const NotYetPolyLike& e) {
        report.checks.push_back({"g", "polynomial-like degree 2", CheckStatus::Fail, {}, e.what()});
    }
    return report;
}

struct Figure1Parameters {
    double a;
    double b;
    double residual; ///< |f^2(0)|
};

/// b with a b^2 - b + 1 = 0 on the branch b -> 1 as a -> 0, so that 0 has
/// period 2 for a z^3 + z^2 - b.
inline Figure1Parameters figure1_parameters(double a) {
    if (a > 0.25) throw NoRealRoot("a b^2 - b + 1 = 0 has no real root for a > 1/4");
    if (!(a > 0.0)) throw std::invalid_argument("figure1_parameters: a must be positive");
    const double b = 2.0 / (1.0 + std::sqrt(1.0 - 4.0 * a));
    const Polynomial f = cubic_map(a, b);
    return {a, b, std::abs(f(f(Complex(0.0))))};
}

/// Frame used when rendering the figure1 preset.
inline Frame figure1_frame(int resolution = 1024) { return Frame({-2.5, 2.0, -2.25, 2.25}, resolution, resolution); }

} // namespace polydyn

#endif // POLYDYN_CUBIC_FAMILY_HPP
