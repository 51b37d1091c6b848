#ifndef POLYDYN_COMPONENTS_HPP
#define POLYDYN_COMPONENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "polydyn/error.hpp"
#include "polydyn/escape.hpp"
#include "polydyn/parallel.hpp"
#include "polydyn/polynomial.hpp"

namespace polydyn {

/// How a point is tested against a pixel set.
///   Exact   - the pixel containing the point
///   Dilated - the pixel or one of its 8 neighbours (tolerance collar)
///   Eroded  - the pixel and all 8 neighbours (safety collar; prunes when uncertain)
enum class Collar { Exact, Dilated, Eroded };

struct ComponentInfo {
    int label = 0;
    std::size_t pixels = 0;
    int col_min = std::numeric_limits<int>::max(), col_max = -1;
    int row_min = std::numeric_limits<int>::max(), row_max = -1;
    bool touches_border = false;
    std::vector<int> critical; ///< indices into LevelGrid::critical
};

/// Components of f^{-n}(D(0,R)) sampled on a frame. Labels are 1-based in
/// raster-scan discovery order; 0 marks pixels outside the set.
struct LevelGrid {
    int level = 0;
    Frame frame;
    std::vector<std::int32_t> labels;
    std::vector<ComponentInfo> components; ///< components[label - 1]
    std::vector<Root> critical;            ///< critical points of f, for the sidecar flags

    int component_count() const { return static_cast<int>(components.size()); }
    const ComponentInfo& info(int label) const { return components[static_cast<std::size_t>(label - 1)]; }

    int label_at(int col, int row) const { return labels[frame.index(col, row)]; }

    /// Label of the pixel containing z; 0 outside the frame.
    int label_at(Complex z) const {
        int col, row;
        return frame.locate(z, col, row) ? label_at(col, row) : 0;
    }

    bool contains(int label, Complex z, Collar collar = Collar::Exact) const {
        int col, row;
        if (!frame.locate(z, col, row)) return false;
        if (collar == Collar::Exact) return label_at(col, row) == label;
        bool any = false, all = true;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const int c = col + dc, r = row + dr;
                const bool hit = c >= 0 && r >= 0 && c < frame.width && r < frame.height && label_at(c, r) == label;
                any = any || hit;
                all = all && hit;
            }
        return collar == Collar::Dilated ? any : all;
    }

    std::vector<std::size_t> pixels_of(int label) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) out.push_back(i);
        return out;
    }
};

namespace detail {

/// Per-pixel first n in [0, n_max] with !(|f^n(center)| < R); n_max + 1 if none.
inline std::vector<std::int16_t> escape_levels(const DynSetup& setup, const Frame& frame, int n_max, int threads) {
    std::vector<std::int16_t> out(frame.size());
    parallel_for(static_cast<std::size_t>(frame.height), threads, [&](std::size_t row) {
        for (int col = 0; col < frame.width; ++col) {
            Complex z = frame.center(col, static_cast<int>(row));
            int n = 0;
            while (n <= n_max && std::abs(z) < setup.radius) {
                z = setup.p(z);
                ++n;
            }
            out[frame.index(col, static_cast<int>(row))] = static_cast<std::int16_t>(n);
        }
    });
    return out;
}

/// 4-connected labelling in raster-scan discovery order.
inline LevelGrid label_level(const std::vector<std::int16_t>& escape, int level, const Frame& frame,
                             const std::vector<Root>& critical) {
    LevelGrid g{level, frame, std::vector<std::int32_t>(frame.size(), 0), {}, critical};
    std::vector<std::size_t> stack;
    const auto inside = [&](std::size_t i) { return escape[i] > level; };
    for (std::size_t start = 0; start < frame.size(); ++start) {
        if (!inside(start) || g.labels[start] != 0) continue;
        ComponentInfo info;
        info.label = g.component_count() + 1;
        g.labels[start] = info.label;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int col = static_cast<int>(i % static_cast<std::size_t>(frame.width));
            const int row = static_cast<int>(i / static_cast<std::size_t>(frame.width));
            ++info.pixels;
            info.col_min = std::min(info.col_min, col);
            info.col_max = std::max(info.col_max, col);
            info.row_min = std::min(info.row_min, row);
            info.row_max = std::max(info.row_max, row);
            if (col == 0 || row == 0 || col == frame.width - 1 || row == frame.height - 1)
                info.touches_border = true;
            const auto visit = [&](int c, int r) {
                if (c < 0 || r < 0 || c >= frame.width || r >= frame.height) return;
                const std::size_t j = frame.index(c, r);
                if (inside(j) && g.labels[j] == 0) {
                    g.labels[j] = info.label;
                    stack.push_back(j);
                }
            };
            visit(col + 1, row);
            visit(col - 1, row);
            visit(col, row + 1);
            visit(col, row - 1);
        }
        g.components.push_back(std::move(info));
    }
    for (std::size_t k = 0; k < critical.size(); ++k) {
        const int label = g.label_at(critical[k].z);
        if (label > 0) g.components[static_cast<std::size_t>(label - 1)].critical.push_back(static_cast<int>(k));
    }
    return g;
}

} // namespace detail

/// Components of f^{-n}(D(0,R)) on the frame.
inline LevelGrid level_grid(const DynSetup& setup, int n, const Frame& frame, int threads = 0) {
    if (n < 0) throw std::invalid_argument("level_grid: n < 0");
    const auto escape = detail::escape_levels(setup, frame, n, threads);
    return detail::label_level(escape, n, frame, critical_points(setup.p));
}

/// Level grids 0..n_max from a single forward pass.
inline std::vector<LevelGrid> level_grids(const DynSetup& setup, int n_max, const Frame& frame, int threads = 0) {
    const auto escape = detail::escape_levels(setup, frame, n_max, threads);
    const auto critical = critical_points(setup.p);
    std::vector<LevelGrid> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) out.push_back(detail::label_level(escape, n, frame, critical));
    return out;
}

/// Sidecar record per component: label, pixel count, bounding box (pixel and
/// plane coordinates), border flag and contained critical points.
inline void write_sidecar(std::ostream& os, const LevelGrid& g) {
    const auto saved = os.precision(17);
    os << "level: " << g.level << "\ncomponents: " << g.component_count() << "\n";
    for (const auto& c : g.components) {
        const Complex lo = g.frame.center(c.col_min, c.row_max);
        const Complex hi = g.frame.center(c.col_max, c.row_min);
        os << "component: label=" << c.label << " pixels=" << c.pixels << " cols=" << c.col_min << ".." << c.col_max
           << " rows=" << c.row_min << ".." << c.row_max << " box=[" << lo.real() << "," << hi.real() << "]x["
           << lo.imag() << "," << hi.imag() << "] border=" << (c.touches_border ? 1 : 0) << " critical=";
        if (c.critical.empty()) os << "none";
        for (std::size_t k = 0; k < c.critical.size(); ++k) {
            const auto& r = g.critical[static_cast<std::size_t>(c.critical[k])];
            // + 0.0 turns -0 into 0
            os << (k ? ";" : "") << r.z.real() + 0.0 << (r.z.imag() < 0 ? "" : "+") << r.z.imag() + 0.0 << "i*"
               << r.multiplicity;
        }
        os << "\n";
    }
    os.precision(saved);
}

/// Labels clamped to 255 for PGM output.
inline std::vector<std::uint8_t> clamped_labels(const LevelGrid& g) {
    std::vector<std::uint8_t> out(g.labels.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(std::min(g.labels[i], 255));
    return out;
}

/// The nested components U_n(C) containing a seed, n = 0..n_max.
struct ComponentChain {
    Complex seed;
    std::shared_ptr<const std::vector<LevelGrid>> grids;
    std::vector<int> labels;                 ///< labels[n] = U_n at level n
    std::vector<std::size_t> areas;          ///< pixel counts
    std::vector<bool> nested;                ///< nested[n]: pixels(U_{n+1}) subset of pixels(U_n)
    std::vector<bool> closure_nested;        ///< same with U_{n+1} dilated by one pixel

    int max_level() const { return static_cast<int>(labels.size()) - 1; }
    const LevelGrid& grid(int n) const { return (*grids)[static_cast<std::size_t>(n)]; }
    const Frame& frame() const { return grid(0).frame; }
    bool in(int n, std::size_t pixel) const { return grid(n).labels[pixel] == labels[static_cast<std::size_t>(n)]; }
    bool all_nested() const { return std::all_of(nested.begin(), nested.end(), [](bool b) { return b; }); }
};

namespace detail {

inline bool dilated_subset(const LevelGrid& inner, int inner_label, const LevelGrid& outer, int outer_label) {
    const Frame& f = inner.frame;
    for (int row = 0; row < f.height; ++row)
        for (int col = 0; col < f.width; ++col) {
            if (inner.label_at(col, row) != inner_label) continue;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const int c = col + dc, r = row + dr;
                    if (c < 0 || r < 0 || c >= f.width || r >= f.height) continue;
                    if (outer.label_at(c, r) != outer_label) return false;
                }
        }
    return true;
}

inline bool subset(const LevelGrid& inner, int inner_label, const LevelGrid& outer, int outer_label) {
    for (std::size_t i = 0; i < inner.labels.size(); ++i)
        if (inner.labels[i] == inner_label && outer.labels[i] != outer_label) return false;
    return true;
}

} // namespace detail

/// Chain from precomputed grids. The seed must stay in D(0,R) for the
/// chain depth and its pixel must be inside every level mask.
inline ComponentChain component_chain(const DynSetup& setup, Complex seed,
                                      std::shared_ptr<const std::vector<LevelGrid>> grids) {
    const int n_max = static_cast<int>(grids->size()) - 1;
    const OrbitClass oc = classify(setup.p, setup.radius, seed, n_max);
    if (oc.escaped())
        throw SeedEscapes("seed leaves D(0,R) after " + std::to_string(oc.steps) + " steps");
    ComponentChain chain{seed, std::move(grids), {}, {}, {}, {}};
    for (int n = 0; n <= n_max; ++n) {
        const int label = chain.grid(n).label_at(seed);
        if (label == 0)
            throw ResolutionTooCoarse("seed pixel is outside the level-" + std::to_string(n) + " mask");
        chain.labels.push_back(label);
        chain.areas.push_back(chain.grid(n).info(label).pixels);
    }
    for (int n = 0; n < n_max; ++n) {
        const auto& inner = chain.grid(n + 1);
        const auto& outer = chain.grid(n);
        const int li = chain.labels[static_cast<std::size_t>(n) + 1], lo = chain.labels[static_cast<std::size_t>(n)];
        chain.nested.push_back(detail::subset(inner, li, outer, lo));
        chain.closure_nested.push_back(detail::dilated_subset(inner, li, outer, lo));
    }
    return chain;
}

inline ComponentChain component_chain(const DynSetup& setup, Complex seed, int n_max, const Frame& frame,
                                      int threads = 0) {
    auto grids = std::make_shared<const std::vector<LevelGrid>>(level_grids(setup, n_max, frame, threads));
    return component_chain(setup, seed, std::move(grids));
}

/// Hausdorff distance between the pixel centers of a component and the
/// segment [a, b] of the real axis.
inline double hausdorff_to_real_segment(const LevelGrid& g, int label, double a, double b) {
    const auto dist_to_segment = [&](Complex z) {
        const double dx = z.real() < a ? a - z.real() : (z.real() > b ? z.real() - b : 0.0);
        return std::hypot(dx, z.imag());
    };
    double forward = 0.0;
    std::vector<Complex> centers;
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
        if (g.labels[i] != label) continue;
        const Complex z = g.frame.center(i);
        centers.push_back(z);
        forward = std::max(forward, dist_to_segment(z));
    }
    if (centers.empty()) return std::numeric_limits<double>::infinity();

    // segment side: nearest component pixel by expanding square rings
    double backward = 0.0;
    const int samples = 8 * std::max(g.frame.width, g.frame.height);
    for (int s = 0; s <= samples; ++s) {
        const Complex y(a + (b - a) * s / samples, 0.0);
        int col, row;
        if (!g.frame.locate(y, col, row)) return std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(g.frame.width, g.frame.height);
        for (int ring = 0; ring <= max_ring; ++ring) {
            if ((ring - 1) * g.frame.pitch() * 0.5 > best) break;
            for (int r = row - ring; r <= row + ring; ++r)
                for (int c = col - ring; c <= col + ring; ++c) {
                    if (std::max(std::abs(r - row), std::abs(c - col)) != ring) continue;
                    if (c < 0 || r < 0 || c >= g.frame.width || r >= g.frame.height) continue;
                    if (g.label_at(c, r) != label) continue;
                    best = std::min(best, std::abs(g.frame.center(c, r) - y));
                }
        }
        backward = std::max(backward, best);
    }
    return std::max(forward, backward);
}

/// F = f restricted to U_{m+1}, mapping onto U_m, at grid scale.
struct PolyLikeRestriction {
    int level = 0;       ///< m
    int outer_label = 0; ///< U_m at level m
    int inner_label = 0; ///< U_{m+1} at level m+1
    int degree = 0;      ///< 1 + critical points in U_{m+1} with multiplicity
    int preimage_count = 0; ///< preimages of the seed inside U_{m+1}, independent degree count
    std::vector<Root> critical_inside;
    bool degree_below_ambient = true; ///< deg F < deg f; required when the Julia set is disconnected
    std::vector<int> other_components_inside; ///< level-(m+1) components inside U_m that map elsewhere
    std::shared_ptr<const std::vector<LevelGrid>> grids;

    const LevelGrid& outer_grid() const { return (*grids)[static_cast<std::size_t>(level)]; }
    const LevelGrid& inner_grid() const { return (*grids)[static_cast<std::size_t>(level) + 1]; }
    bool in_outer(Complex z, Collar c = Collar::Exact) const { return outer_grid().contains(outer_label, z, c); }
    bool in_inner(Complex z, Collar c = Collar::Exact) const { return inner_grid().contains(inner_label, z, c); }
};

/// Checks at grid scale that U_{m+1} is the only component of f^{-1}(U_m)
/// meeting U_m, then reads off the degree of F from the critical points it
/// contains.
inline PolyLikeRestriction detect_poly_like(const DynSetup& setup, const ComponentChain& chain, int m) {
    if (m < 0 || m + 1 > chain.max_level())
        throw std::invalid_argument("detect_poly_like: need 0 <= m and m + 1 <= chain length");
    const LevelGrid& outer = chain.grid(m);
    const LevelGrid& inner = chain.grid(m + 1);
    const int um = chain.labels[static_cast<std::size_t>(m)];
    const int um1 = chain.labels[static_cast<std::size_t>(m) + 1];

    if (outer.info(um).touches_border)
        throw NotYetPolyLike(m, "U_m is clipped by the frame");
    if (!chain.nested[static_cast<std::size_t>(m)])
        throw NotYetPolyLike(m, "U_{m+1} is not contained in U_m at grid scale");

    PolyLikeRestriction out;
    out.level = m;
    out.outer_label = um;
    out.inner_label = um1;
    out.grids = chain.grids;

    // level-(m+1) components meeting U_m, with their image component at level m
    std::map<int, std::map<int, std::size_t>> image_votes;
    for (std::size_t i = 0; i < inner.labels.size(); ++i) {
        const int k = inner.labels[i];
        if (k == 0 || k == um1 || outer.labels[i] != um) continue;
        auto& votes = image_votes[k];
        const int target = outer.label_at(setup.p(inner.frame.center(i)));
        ++votes[target];
    }
    for (const auto& [k, votes] : image_votes) {
        int best = 0;
        std::size_t best_count = 0;
        for (const auto& [target, count] : votes)
            if (target != 0 && count > best_count) {
                best = target;
                best_count = count;
            }
        if (best == um)
            throw NotYetPolyLike(m, "component " + std::to_string(k) + " of f^{-1}(U_m) other than U_{m+1} meets U_m");
        out.other_components_inside.push_back(k);
    }

    out.degree = 1;
    for (const int idx : inner.info(um1).critical) {
        const Root& c = inner.critical[static_cast<std::size_t>(idx)];
        out.critical_inside.push_back(c);
        out.degree += c.multiplicity;
    }

    // independent count: preimages of the seed landing in U_{m+1}
    for (const auto& r : roots(setup.p.minus_constant(chain.seed), 1e-10))
        if (inner.contains(um1, r.z, Collar::Dilated)) out.preimage_count += r.multiplicity;
    if (out.preimage_count != out.degree)
        throw NotYetPolyLike(m, "preimage count " + std::to_string(out.preimage_count) +
                                    " disagrees with critical-point degree " + std::to_string(out.degree));

    const bool disconnected = connectivity_class(setup).kind != Connectivity::Connected;
    out.degree_below_ambient = out.degree < setup.p.degree();
    if (disconnected && !out.degree_below_ambient)
        throw NotYetPolyLike(m, "degree of F equals deg f although the Julia set is disconnected");
    return out;
}

/// Probes m = m_start .. m_cap and returns the first polynomial-like level.
inline PolyLikeRestriction find_poly_like(const DynSetup& setup, const ComponentChain& chain, int m_start = 1,
                                          int m_cap = 12) {
    std::string last = "no level probed";
    for (int m = m_start; m <= m_cap && m + 1 <= chain.max_level(); ++m) {
        try {
            return detect_poly_like(setup, chain, m);
        } catch (const NotYetPolyLike& e) {
            last = e.what();
        }
    }
    throw NotYetPolyLike(m_cap, "no polynomial-like level up to the cap (" + last + ")");
}

/// A component V of f^{-N1}(D(0,R)) with closure in U_m \ U_{m+1}; f^{N1}
/// maps it onto D(0,R), so its inverse branches send U_m into V.
struct VBranch {
    int outer_level = 0; ///< m
    int level = 0;       ///< N1
    int label = 0;
    ComponentInfo info;
    /// image_labels[j] = label of f^j(V) at level N1 - j, or 0 where the image
    /// is clipped by the frame and cannot be used for pruning. j = 0 is V.
    std::vector<int> image_labels;
    int degree = 0; ///< number of f^{N1}-preimages of the seed inside V
    std::size_t certified_pixels = 0;
    bool meets_filled_julia = false; ///< V contains a preimage of the seed (a point of K(f))
    std::shared_ptr<const std::vector<LevelGrid>> grids;

    const LevelGrid& grid(int n) const { return (*grids)[static_cast<std::size_t>(n)]; }
};

struct BranchPoint {
    Complex point;
    double log_derivative; ///< log |(f^k)'(point)| for the k steps taken
};

/// Preimages of x under f^{N1} that lie in V, with their derivatives.
/// Intermediate points are pruned against the forward images of V where
/// those are fully inside the frame; the final test uses `collar`.
inline std::vector<BranchPoint> v_preimages(const Polynomial& p, const VBranch& v, Complex x,
                                            Collar collar = Collar::Eroded, double tol = 1e-10) {
    std::vector<BranchPoint> current{{x, 0.0}};
    for (int s = 1; s <= v.level; ++s) {
        std::vector<BranchPoint> next;
        const int j = v.level - s; // points now lie in f^j(V), a level-s component
        const int target = v.image_labels[static_cast<std::size_t>(j)];
        for (const auto& node : current) {
            for (const auto& r : roots(p.minus_constant(node.point), tol)) {
                const double ld = node.log_derivative + std::log(std::abs(p.value_and_derivative(r.z).second));
                if (s == v.level) {
                    if (v.grid(v.level).contains(v.label, r.z, collar)) next.push_back({r.z, ld});
                } else {
                    int col, row;
                    const bool in_frame = v.grid(s).frame.locate(r.z, col, row);
                    if (target == 0 || !in_frame || v.grid(s).contains(target, r.z, Collar::Dilated))
                        next.push_back({r.z, ld});
                }
            }
        }
        current = std::move(next);
        if (current.empty()) break;
    }
    return current;
}

/// Searches N1 = m+1, m+2, ... (up to the chain depth) for a V-branch.
/// `certify_samples` bounds how many pixel centers of U_m are checked for a
/// preimage landing in V.
inline VBranch find_V_branch(const DynSetup& setup, const ComponentChain& chain, const PolyLikeRestriction& restriction,
                             std::size_t certify_samples = 256) {
    if (connectivity_class(setup).kind != Connectivity::Disconnected)
        throw NotFound("V-branch requires a disconnected Julia set");
    const int m = restriction.level;
    const LevelGrid& outer = chain.grid(m);
    const LevelGrid& inner = chain.grid(m + 1);
    const auto outer_pixels = outer.pixels_of(restriction.outer_label);

    for (int level = m + 1; level <= chain.max_level(); ++level) {
        const LevelGrid& g = chain.grid(level);
        for (const auto& comp : g.components) {
            if (comp.touches_border || comp.label == chain.labels[static_cast<std::size_t>(level)]) continue;
            // closure of V inside U_m and away from U_{m+1}
            if (!detail::dilated_subset(g, comp.label, outer, restriction.outer_label)) continue;
            bool meets_inner = false;
            for (std::size_t i = 0; i < g.labels.size() && !meets_inner; ++i) {
                if (g.labels[i] != comp.label) continue;
                meets_inner = inner.contains(restriction.inner_label, g.frame.center(i), Collar::Dilated);
            }
            if (meets_inner) continue;

            VBranch v;
            v.outer_level = m;
            v.level = level;
            v.label = comp.label;
            v.info = comp;
            v.grids = chain.grids;
            v.image_labels.assign(static_cast<std::size_t>(level) + 1, 0);
            v.image_labels[0] = comp.label;
            const auto pixels = g.pixels_of(comp.label);
            for (int j = 1; j < level; ++j) {
                const LevelGrid& gj = chain.grid(level - j);
                std::map<int, std::size_t> votes;
                std::size_t in_frame = 0;
                for (const std::size_t i : pixels) {
                    Complex z = g.frame.center(i);
                    for (int s = 0; s < j; ++s) z = setup.p(z);
                    int col, row;
                    if (!gj.frame.locate(z, col, row)) continue;
                    ++in_frame;
                    ++votes[gj.label_at(col, row)];
                }
                if (in_frame != pixels.size()) continue;
                for (const auto& [label, count] : votes) {
                    if (label != 0 && count * 100 >= pixels.size() * 99 && !gj.info(label).touches_border)
                        v.image_labels[static_cast<std::size_t>(j)] = label;
                }
            }

            // f^{N1}(V) covers U_m: sampled pixel centers of U_m have a preimage in V
            const std::size_t stride = std::max<std::size_t>(1, outer_pixels.size() / certify_samples);
            bool covers = true;
            for (std::size_t k = 0; k < outer_pixels.size() && covers; k += stride) {
                covers = !v_preimages(setup.p, v, outer.frame.center(outer_pixels[k]), Collar::Exact).empty();
                ++v.certified_pixels;
            }
            if (!covers) continue;

            const auto seed_pre = v_preimages(setup.p, v, chain.seed, Collar::Exact);
            v.degree = static_cast<int>(seed_pre.size());
            v.meets_filled_julia = !seed_pre.empty();
            return v;
        }
    }
    throw NotFound("no V-branch up to level " + std::to_string(chain.max_level()));
}

/// Deterministic, nested point set inside a component: Halton points over
/// its bounding box, kept when inside the eroded component and outside the
/// dilated `exclude` component. The first k points of a request for 2k
/// are the points of a request for k.
inline std::vector<Complex> sample_component(const LevelGrid& g, int label, const LevelGrid* exclude_grid,
                                             int exclude_label, std::size_t count) {
    const auto halton = [](std::size_t index, int base) {
        double f = 1.0, r = 0.0;
        while (index > 0) {
            f /= base;
            r += f * static_cast<double>(index % static_cast<std::size_t>(base));
            index /= static_cast<std::size_t>(base);
        }
        return r;
    };
    const ComponentInfo& c = g.info(label);
    const Complex lo = g.frame.center(c.col_min, c.row_max);
    const Complex hi = g.frame.center(c.col_max, c.row_min);
    std::vector<Complex> out;
    const std::size_t cap = 1000 * count + 100000;
    for (std::size_t i = 1; out.size() < count && i < cap; ++i) {
        const Complex z(lo.real() + (hi.real() - lo.real()) * halton(i, 2),
                        lo.imag() + (hi.imag() - lo.imag()) * halton(i, 3));
        if (!g.contains(label, z, Collar::Eroded)) continue;
        if (exclude_grid && exclude_grid->contains(exclude_label, z, Collar::Dilated)) continue;
        out.push_back(z);
    }
    return out;
}

} // namespace polydyn

#endif // POLYDYN_COMPONENTS_HPP
