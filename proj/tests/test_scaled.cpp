#include <gtest/gtest.h>

#include <random>

#include "lpp/oracle.hpp"
#include "lpp/scaled.hpp"
#include "lpp/suites.hpp"

using namespace lpp;

namespace {

double uni(std::mt19937_64& e, double lo, double hi) { return lo + (hi - lo) * detail::uniform01(e); }

PointField empty_box(double n) { return PointField::empty(scaled_box(n, -1, 3, -3, 3)); }

} // namespace

TEST(Scaling, Examples) {
    for (double n : {1.0, 8.0, 1000.0}) {
        const auto p = to_unscaled(n, {0, 1});
        EXPECT_DOUBLE_EQ(p.a, n);
        EXPECT_DOUBLE_EQ(p.b, n);
    }
    const auto q = to_unscaled(8, {1, 1});
    EXPECT_DOUBLE_EQ(q.a, 12.0);
    EXPECT_DOUBLE_EQ(q.b, 4.0);
}

TEST(Scaling, RoundTrip) {
    std::mt19937_64 e(3);
    for (int i = 0; i < 100000; ++i) {
        const double n = uni(e, 1, 1e4);
        const ScaledPoint p{uni(e, -5, 5), uni(e, -2, 2)};
        const auto back = to_scaled(n, to_unscaled(n, p));
        EXPECT_NEAR(back.x, p.x, 1e-12 * (1 + std::abs(p.x)) + 1e-12 * n);
        EXPECT_NEAR(back.t, p.t, 1e-14 * (1 + std::abs(p.t)) * 16);
    }
}

TEST(Compatible, Examples) {
    EXPECT_TRUE(compatible(0.5, {0, 0}, {0, 1}));
    EXPECT_TRUE(compatible(77, {0, 0}, {0, 1}));
    EXPECT_FALSE(compatible(1, {0, 0}, {2, 1}));
    EXPECT_TRUE(compatible(1000, {0, 0}, {9.9, 1}));
    EXPECT_THROW(compatible(10, {0, 1}, {0, 1}), Error);
}

TEST(Polymer, EmptyFieldIsTheChord) {
    const double n = 50;
    const auto p = polymer(empty_box(n), n, {-0.5, 0}, {0.5, 1}, Side::leftmost);
    ASSERT_EQ(p.vertices().size(), 2u);
    EXPECT_NEAR(p(0.25), -0.25, 1e-12);
    EXPECT_NEAR(p(0.0), -0.5, 1e-12);
    EXPECT_NEAR(p(1.0), 0.5, 1e-12);
    EXPECT_THROW(p(1.5), Error);
}

TEST(Polymer, IncompatibleOrUncoveredEndpoints) {
    const double n = 8;
    try {
        polymer(empty_box(n), n, {0, 0}, {3, 1}, Side::leftmost);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::incompatible_endpoints);
    }
    try {
        polymer(PointField::empty(Region::rectangle(0, 1, 0, 1)), n, {0, 0}, {0, 1}, Side::leftmost);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::region_too_small);
    }
}

TEST(Polymer, EvaluationOnAHandBuiltThreeVertexPolymer) {
    // n = 1: a point at (1.5, 0.5) is the scaled point (0.5, 1)
    const auto f = PointField::from_points({{1.5, 0.5}}, Region::rectangle(0, 4, 0, 4));
    const auto p = polymer(f, 1, {0, 0}, {0, 2}, Side::leftmost);
    ASSERT_EQ(p.vertices().size(), 3u);
    EXPECT_NEAR(p.vertices()[1].x, 0.5, 1e-15);
    EXPECT_NEAR(p.vertices()[1].t, 1.0, 1e-15);
    for (int k = 0; k <= 40; ++k) {
        const double t = 2.0 * k / 40.0;
        const double expected = t <= 1 ? 0.5 * t : 0.5 * (2 - t);
        EXPECT_NEAR(p(t), expected, 1e-14);
    }
    EXPECT_NEAR(transversal_fluctuation(p), 0.5, 1e-15);
    // the unscaled geodesic is the uppermost one
    EXPECT_EQ(p.chain(), uppermost_geodesic(f, {0, 0}, {2, 2}));
}

TEST(Polymer, MidpointOfATwoVertexPolymer) {
    const auto p = polymer(empty_box(20), 20, {0.2, 0.5}, {0.6, 1.5}, Side::rightmost);
    EXPECT_NEAR(p(1.0), 0.4, 1e-12);
    EXPECT_NEAR(p(0.5), 0.2, 1e-12);
}

TEST(Weight, EmptyFieldAndTranslation) {
    for (double n : {10.0, 1000.0}) {
        EXPECT_NEAR(weight(empty_box(n), n, {0, 0}, {0, 1}), -2 * std::cbrt(n * n), 1e-9 * n);
    }
    // a vertical shift by Δt in scaled time is a shift by (nΔt, nΔt)
    const double n = 64, shift = 0.25;
    const auto f = sample_field(scaled_box(n, 0, 1, -2, 2), 1.0, 4);
    std::vector<PlanePoint> moved;
    for (const auto& p : f.points()) moved.push_back({p.a + n * shift, p.b + n * shift});
    const auto g = PointField::from_points(moved, scaled_box(n, shift, 1 + shift, -2, 2));
    EXPECT_EQ(weight(f, n, {0.1, 0.125}, {-0.2, 0.875}), weight(g, n, {0.1, 0.125 + shift}, {-0.2, 0.875 + shift}));
}

TEST(Weight, SuperadditivityOnSampledTriples) {
    const auto r = suites::superadditivity(1000, 7);
    EXPECT_EQ(r.instances, 1000u);
    EXPECT_EQ(r.violations, 0u) << r.first_violation;
}

TEST(TransversalFluctuation, Examples) {
    const double n = 30;
    EXPECT_EQ(tf_between(empty_box(n), n, {0, 0}, {0, 1}), 0.0);
    // one point offset by δ from the chord: TF is exactly |δ|
    const double delta = 0.3;
    const auto at = to_unscaled(n, {delta, 0.4});
    const auto f = PointField::from_points({at}, scaled_box(n, 0, 1, -1, 1));
    const auto p = polymer(f, n, {0, 0}, {0, 1}, Side::leftmost);
    EXPECT_NEAR(transversal_fluctuation(p), delta, 1e-12);
    EXPECT_NEAR(tf_between(f, n, {0, 0}, {0, 1}), delta, 1e-12);
}

TEST(TransversalFluctuation, VerticesAgreeWithDenseGrid) {
    std::mt19937_64 e(8);
    const double n = 200;
    for (int i = 0; i < 200; ++i) {
        const auto f = sample_field(truncated_window(n, {0, 0}, {0, 1}, 2.0), 1.0, e());
        const auto pair = polymer_pair(f, n, {0, 0}, {0, 1});
        for (const Polymer* p : {&pair.leftmost, &pair.rightmost}) {
            double grid = 0;
            for (int k = 0; k <= 10000; ++k) {
                const double t = k / 10000.0;
                grid = std::max(grid, std::abs((*p)(t) - p->chord(t)));
            }
            const double exact = transversal_fluctuation(*p);
            EXPECT_GE(exact, grid - 1e-12);
            // between grid nodes the deviation moves by at most the steepest
            // slope times half a step
            double slope = 0;
            const auto v = p->vertices();
            for (std::size_t k = 1; k < v.size(); ++k) slope = std::max(slope, std::abs(v[k].x - v[k - 1].x) / (v[k].t - v[k - 1].t));
            EXPECT_LE(exact, grid + slope * 1e-4 + 1e-12);
        }
        EXPECT_GE(tf_between(f, n, {0, 0}, {0, 1}), transversal_fluctuation(pair.leftmost));
        EXPECT_GE(tf_between(f, n, {0, 0}, {0, 1}), transversal_fluctuation(pair.rightmost));
    }
}

TEST(TransversalFluctuation, UniqueGeodesicInstance) {
    const double n = 30;
    const auto p1 = to_unscaled(n, {0.2, 0.3}), p2 = to_unscaled(n, {-0.1, 0.7});
    const auto f = PointField::from_points({p1, p2}, scaled_box(n, 0, 1, -1, 1));
    const auto single = polymer(f, n, {0, 0}, {0, 1}, Side::rightmost);
    EXPECT_NEAR(tf_between(f, n, {0, 0}, {0, 1}), transversal_fluctuation(single), 1e-15);
    EXPECT_NEAR(transversal_fluctuation(single), 0.2, 1e-12);
}

TEST(MinTf, Examples) {
    const double n = 40;
    EXPECT_FALSE(min_tf_exceeds(empty_box(n), n, 0, 1, 0.01));
    const auto f = sample_field(scaled_box(n, 0, 1, -2, 2), 1.0, 12);
    EXPECT_FALSE(min_tf_exceeds(f, n, 0, 1, std::cbrt(n)));
    EXPECT_THROW(min_tf_exceeds(f, n, 0, 1, 0), Error);
}

// Brute force: min over enumerated geodesics of TF against the vertical chord.
TEST(MinTf, AgreesWithEnumeration) {
    std::mt19937_64 e(21);
    const double n = 3;
    std::size_t instances = 0;
    while (instances < 300) {
        const auto f = sample_field(Region::rectangle(-1, 5, -1, 5), 1.2, e());
        const PlanePoint u = to_unscaled(n, {0, 0}), v = to_unscaled(n, {0, 1});
        std::size_t inside = 0;
        for (const auto& p : f.points()) inside += dominated_by(u, p) && dominated_by(p, v);
        if (inside > oracle::max_points) continue;
        ++instances;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : oracle::enumerate_geodesics(f, u, v)) {
            double tf = 0;
            for (const auto& p : g.interior) tf = std::max(tf, std::abs(to_scaled(n, p).x));
            best = std::min(best, tf);
        }
        EXPECT_NEAR(min_tf(f, n, {0, 0}, {0, 1}), best, 1e-12);
        for (int k = 0; k < 5; ++k) {
            const double s = uni(e, 0.01, 1.0);
            EXPECT_EQ(min_tf_exceeds(f, n, 0, 1, s), best > s) << "s=" << s << " min tf=" << best;
        }
    }
}

TEST(Mtf, EmptyFieldAndMonotoneRefinement) {
    const double n = 100;
    const auto empty = PointField::empty(scaled_box(n, -0.1, 1.1, -3, 3));
    EXPECT_NEAR(mtf_estimate(empty, n, 0.5, 4, 2), 0.0, 1e-12);
    const auto f = sample_field(scaled_box(n, -0.01, 1.01, -2.5, 2.5), 1.0, 5);
    const double t = 0.5;
    const double r1 = mtf_estimate(f, n, t, 4, 1), r2 = mtf_estimate(f, n, t, 4, 2), r4 = mtf_estimate(f, n, t, 4, 4);
    EXPECT_LE(r1, r2);
    EXPECT_LE(r2, r4);
    // mesh-aligned vertical pair (0, z) -> (0, z + t)
    EXPECT_GE(r2, tf_between(f, n, {0, 0}, {0, t}));
    EXPECT_GE(r2, tf_between(f, n, {0, 0.5}, {0, 1.0}));
}

TEST(Suites, PolymerOrdering) { EXPECT_TRUE(suites::polymer_ordering(100, 4).ok()); }
TEST(Suites, Sandwiching) { EXPECT_TRUE(suites::sandwiching(100, 5).ok()); }
TEST(Suites, TwoPointAgreement) { EXPECT_TRUE(suites::two_point_agreement(100, 6).ok()); }
