#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "polydyn/components.hpp"
#include "polydyn/cubic_family.hpp"

using namespace polydyn;

namespace {

const Frame kSquare({-3.0, 3.0, -3.0, 3.0}, 384, 384);

// brute-force 4-connected component count of a boolean mask, union-find
int count_components(const std::vector<char>& mask, int w, int h) {
    std::vector<int> parent(mask.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    const auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const int i = r * w + c;
            if (!mask[static_cast<std::size_t>(i)]) continue;
            if (c + 1 < w && mask[static_cast<std::size_t>(i + 1)]) parent[static_cast<std::size_t>(find(i))] = find(i + 1);
            if (r + 1 < h && mask[static_cast<std::size_t>(i + w)]) parent[static_cast<std::size_t>(find(i))] = find(i + w);
        }
    std::set<int> roots;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) roots.insert(find(static_cast<int>(i)));
    return static_cast<int>(roots.size());
}

} // namespace

TEST(LevelGrid, PowerMapLevelsAreDiscs) {
    // f^{-n}(D(0,2)) for z^2 is the disc of radius 2^{1/2^n}
    const DynSetup s(Polynomial::monomial(2));
    const auto grids = level_grids(s, 4, kSquare, 2);
    for (int n = 0; n <= 4; ++n) {
        const LevelGrid& g = grids[static_cast<std::size_t>(n)];
        ASSERT_EQ(g.component_count(), 1) << n;
        const double r = std::pow(2.0, std::ldexp(1.0, -n));
        const double area = std::numbers::pi * r * r / (kSquare.pitch_x() * kSquare.pitch_y());
        EXPECT_NEAR(static_cast<double>(g.info(1).pixels), area, 0.02 * area) << n;
        EXPECT_EQ(g.info(1).critical.size(), 1u);
    }
}

TEST(LevelGrid, LabelsAgreeWithUnionFind) {
    const DynSetup s(Polynomial{1.0, 0.0, 1.0});
    for (int n = 0; n <= 5; ++n) {
        const LevelGrid g = level_grid(s, n, kSquare, 3);
        std::vector<char> mask(g.labels.size());
        for (std::size_t i = 0; i < mask.size(); ++i) {
            Complex z = kSquare.center(i);
            bool inside = true;
            for (int k = 0; k <= n && inside; ++k) {
                inside = std::abs(z) < s.radius;
                z = s.p(z);
            }
            mask[i] = inside;
            ASSERT_EQ(inside, g.labels[i] != 0) << i;
        }
        EXPECT_EQ(g.component_count(), count_components(mask, kSquare.width, kSquare.height)) << n;
    }
}

TEST(LevelGrid, CantorCaseDoublesPastCriticalEscape) {
    // z^2 + 1, R = 3: 0 -> 1 -> 2 -> 5 leaves D(0,3) at step 3, so every
    // level from 3 on has exactly twice the components of the level below
    const DynSetup s(Polynomial{1.0, 0.0, 1.0});
    const auto grids = level_grids(s, 5, Frame({-2.0, 2.0, -2.0, 2.0}, 1024, 1024), 2);
    for (int n = 0; n <= 2; ++n) EXPECT_EQ(grids[static_cast<std::size_t>(n)].component_count(), 1) << n;
    for (int n = 3; n <= 5; ++n)
        EXPECT_EQ(grids[static_cast<std::size_t>(n)].component_count(),
                  2 * grids[static_cast<std::size_t>(n) - 1].component_count()) << n;
}

TEST(LevelGrid, ThreadCountDoesNotChangeLabels) {
    const DynSetup s(cubic_map(0.05, 2.1296224513683883));
    const Frame f = Frame::real_axis_aligned(5.0, 256);
    EXPECT_EQ(level_grid(s, 6, f, 1).labels, level_grid(s, 6, f, 4).labels);
}

TEST(LevelGrid, SidecarListsEveryComponent) {
    const LevelGrid g = level_grid(DynSetup(Polynomial{1.0, 0.0, 1.0}), 4, kSquare, 1);
    std::ostringstream os;
    write_sidecar(os, g);
    const std::string s = os.str();
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = s.find("component: ", pos)) != std::string::npos; ++pos) ++lines;
    EXPECT_EQ(lines, static_cast<std::size_t>(g.component_count()));
    EXPECT_NE(s.find("components: " + std::to_string(g.component_count())), std::string::npos);
}

TEST(Collar, ErodedInsideExactInsideDilated) {
    const LevelGrid g = level_grid(DynSetup(Polynomial::monomial(2)), 1, kSquare, 1);
    // radius sqrt(2) disc; probe along a ray
    for (double r = 1.2; r < 1.6; r += 0.003) {
        const Complex z(r, 0.001);
        const bool eroded = g.contains(1, z, Collar::Eroded);
        const bool exact = g.contains(1, z, Collar::Exact);
        const bool dilated = g.contains(1, z, Collar::Dilated);
        EXPECT_TRUE(!eroded || exact);
        EXPECT_TRUE(!exact || dilated);
    }
    EXPECT_TRUE(g.contains(1, Complex(0.0), Collar::Eroded));
    EXPECT_FALSE(g.contains(1, Complex(1.7, 0.0), Collar::Dilated));
}

TEST(Chain, ChebyshevChainNestsAndHugsTheInterval) {
    const DynSetup s(Polynomial{-2.0, 0.0, 1.0});
    const ComponentChain c = component_chain(s, Complex(0.0), 8, Frame::real_axis_aligned(4.5, 512), 2);
    EXPECT_EQ(c.max_level(), 8);
    for (int n = 0; n < 8; ++n) {
        EXPECT_TRUE(c.nested[static_cast<std::size_t>(n)]) << n;
        EXPECT_GE(c.areas[static_cast<std::size_t>(n)], c.areas[static_cast<std::size_t>(n) + 1]);
    }
    const LevelGrid& g = c.grid(8);
    const double d = hausdorff_to_real_segment(g, c.labels[8], -2.0, 2.0);
    EXPECT_LT(d, 0.1);
    // the chain never shrinks below the interval itself
    EXPECT_GT(d, 0.0);
}

TEST(Chain, SeedErrors) {
    const DynSetup s(Polynomial{-2.0, 0.0, 1.0});
    EXPECT_THROW(component_chain(s, Complex(3.0, 0.0), 4, kSquare, 1), SeedEscapes);
    // a bounded seed in a sliver that the coarse grid misses
    EXPECT_THROW(component_chain(s, Complex(0.0, 0.0), 10, Frame({-4.0, 4.0, 0.4, 4.0}, 16, 8), 1),
                 ResolutionTooCoarse);
}

TEST(PolyLike, ChebyshevIsPolyLikeAtFirstLevel) {
    const DynSetup s(Polynomial{-2.0, 0.0, 1.0});
    const ComponentChain c = component_chain(s, Complex(0.0), 6, Frame::real_axis_aligned(4.5, 512), 1);
    const PolyLikeRestriction r = find_poly_like(s, c);
    EXPECT_EQ(r.level, 1);
    EXPECT_EQ(r.degree, 2);
    EXPECT_EQ(r.preimage_count, 2);
    EXPECT_TRUE(r.other_components_inside.empty());
}

TEST(PolyLike, CubicArcCaseHasDegreeTwo) {
    const FamilyPoint fp = gamma_solve(0.05);
    const DynSetup s(cubic_map(fp.eps, fp.beta));
    const ComponentChain c = component_chain(s, Complex(0.0), 6, Frame::real_axis_aligned(5.0, 1024), 2);
    const PolyLikeRestriction r = find_poly_like(s, c);
    EXPECT_EQ(r.degree, 2);
    EXPECT_TRUE(r.degree_below_ambient);
    EXPECT_FALSE(r.other_components_inside.empty());
    ASSERT_EQ(r.critical_inside.size(), 1u);
    EXPECT_LT(std::abs(r.critical_inside[0].z), 1e-9);
    // level 0 is the whole disc and clipped by nothing, but f^{-1}(D) is the
    // union of two discs meeting U_0
    EXPECT_THROW(detect_poly_like(s, c, 0), NotYetPolyLike);
}

TEST(VBranch, CubicArcCaseFindsPreimageDisc) {
    const FamilyPoint fp = gamma_solve(0.05);
    const DynSetup s(cubic_map(fp.eps, fp.beta));
    const ComponentChain c = component_chain(s, Complex(0.0), 6, Frame::real_axis_aligned(5.0, 1024), 2);
    const PolyLikeRestriction r = find_poly_like(s, c);
    const VBranch v = find_V_branch(s, c, r);
    EXPECT_GT(v.level, r.level);
    EXPECT_TRUE(v.meets_filled_julia);
    EXPECT_GT(v.certified_pixels, 0u);
    // every h-preimage maps to x under f^{N1}
    const Complex x(1.0, 0.5);
    const auto pre = v_preimages(s.p, v, x, Collar::Exact);
    ASSERT_FALSE(pre.empty());
    for (const auto& b : pre) {
        const auto od = orbit_derivative(s.p, b.point, v.level);
        EXPECT_LT(std::abs(od.point - x), 1e-8);
        EXPECT_NEAR(b.log_derivative, std::log(std::abs(od.derivative)), 1e-8);
        EXPECT_TRUE(v.grid(v.level).contains(v.label, b.point, Collar::Exact));
    }
}

TEST(VBranch, ConnectedCaseHasNone) {
    const DynSetup s(Polynomial{-2.0, 0.0, 1.0});
    const ComponentChain c = component_chain(s, Complex(0.0), 6, Frame::real_axis_aligned(4.5, 256), 1);
    EXPECT_THROW(find_V_branch(s, c, find_poly_like(s, c)), NotFound);
}

TEST(Sampling, ComponentSamplesAvoidExcludedSet) {
    const DynSetup s(Polynomial{-2.0, 0.0, 1.0});
    const ComponentChain c = component_chain(s, Complex(0.0), 4, Frame::real_axis_aligned(4.5, 256), 1);
    const auto pts = sample_component(c.grid(1), c.labels[1], &c.grid(2), c.labels[2], 40);
    ASSERT_EQ(pts.size(), 40u);
    for (const Complex z : pts) {
        EXPECT_TRUE(c.grid(1).contains(c.labels[1], z));
        EXPECT_FALSE(c.grid(2).contains(c.labels[2], z));
    }
    // nested: a longer request extends a shorter one
    const auto more = sample_component(c.grid(1), c.labels[1], &c.grid(2), c.labels[2], 80);
    EXPECT_TRUE(std::equal(pts.begin(), pts.end(), more.begin()));
}
