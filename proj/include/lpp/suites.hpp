#pragma once

// Exact invariant suites on randomly generated instances. Each suite returns
// how many instances it examined and how many violated the property, with a
// description of the first violation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lpp/chains.hpp"
#include "lpp/field.hpp"
#include "lpp/oracle.hpp"
#include "lpp/profile.hpp"
#include "lpp/scaled.hpp"

namespace lpp::suites {

struct SuiteResult {
    std::string name;
    std::size_t instances = 0;
    std::size_t violations = 0;
    std::string first_violation{};

    bool ok() const { return violations == 0 && instances > 0; }

    void record(bool holds, const std::string& what) {
        ++instances;
        if (holds) return;
        if (violations++ == 0) first_violation = what;
    }
};

namespace detail {

using Engine = std::mt19937_64;

inline double uniform(Engine& e, double lo, double hi) { return lo + (hi - lo) * lpp::detail::uniform01(e); }

// Up to `max_points` uniform points in [0, side]^2 with distinct coordinates.
inline PointField small_field(Engine& e, std::size_t max_points, double side = 10.0) {
    const auto k = static_cast<std::size_t>(e() % (max_points + 1));
    std::vector<PlanePoint> pts;
    std::set<double> as, bs;
    while (pts.size() < k) {
        const PlanePoint p{uniform(e, 0, side), uniform(e, 0, side)};
        if (as.count(p.a) || bs.count(p.b)) continue;
        as.insert(p.a);
        bs.insert(p.b);
        pts.push_back(p);
    }
    return PointField::from_points(std::move(pts), Region::rectangle(0, side, 0, side), e());
}

// Ordered endpoints in [0, side]^2; with probability 1/4 the start is a
// field point and with probability 1/4 the end is.
inline std::pair<PlanePoint, PlanePoint> endpoints(Engine& e, const PointField& f, double side = 10.0) {
    PlanePoint u{uniform(e, 0, side / 2), uniform(e, 0, side / 2)};
    PlanePoint v{uniform(e, side / 2, side), uniform(e, side / 2, side)};
    const auto pts = f.points();
    if (!pts.empty() && e() % 4 == 0) {
        const auto& p = pts[e() % pts.size()];
        if (dominated_by(p, v)) u = p;
    }
    if (!pts.empty() && e() % 4 == 0) {
        const auto& p = pts[e() % pts.size()];
        if (dominated_by(u, p)) v = p;
    }
    return {u, v};
}

inline std::string describe(const PlanePoint& p) {
    return "(" + std::to_string(p.a) + "," + std::to_string(p.b) + ")";
}

// Field on the scaled box t in [0, 2], |x| <= 2 at parameter n. The exact
// invariants hold on any field, so no margin for fluctuations is needed.
inline PointField scaled_field(Engine& e, double n) { return sample_field(scaled_box(n, 0.0, 2.0, -2.0, 2.0), 1.0, e()); }

// Widens a degenerate interval so a region built from it has positive area.
inline std::pair<double, double> widen(double lo, double hi) {
    return hi > lo ? std::pair{lo, hi} : std::pair{lo - 0.5, hi + 0.5};
}

inline double random_time_in(Engine& e, double lo, double hi) { return uniform(e, lo, hi); }

} // namespace detail

// energy == brute force and constrained_energy == brute force on random
// allowed regions, on fields of at most 12 points.
inline SuiteResult oracle_equivalence(std::size_t instances, std::uint64_t seed) {
    SuiteResult r{"oracle_equivalence"};
    detail::Engine e(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        const auto f = detail::small_field(e, 12);
        const auto [u, v] = detail::endpoints(e, f);
        const auto fast = energy(f, u, v);
        const auto slow = oracle::brute_force_energy(f, u, v);
        r.record(fast == slow, "energy " + std::to_string(fast) + " vs brute force " + std::to_string(slow));

        // a rectangle or a diagonal band that still contains both endpoints
        Region allowed = Region::rectangle(0, 10, 0, 10);
        if (e() % 2 == 0) {
            const auto [a_lo, a_hi] =
                detail::widen(std::min(u.a, detail::uniform(e, 0, 10)), std::max(v.a, detail::uniform(e, 0, 10)));
            const auto [b_lo, b_hi] =
                detail::widen(std::min(u.b, detail::uniform(e, 0, 10)), std::max(v.b, detail::uniform(e, 0, 10)));
            allowed = Region::rectangle(a_lo, a_hi, b_lo, b_hi);
        } else {
            const double du = u.a - u.b, dv = v.a - v.b;
            const double w = detail::uniform(e, 0, 3);
            const auto [s_lo, s_hi] = detail::widen(u.a + u.b, v.a + v.b);
            const auto [d_lo, d_hi] = detail::widen(std::min(du, dv) - w, std::max(du, dv) + w);
            allowed = Region::diagonal_band(s_lo, s_hi, d_lo, d_hi);
        }
        const auto c_fast = constrained_energy(f, u, v, allowed);
        const auto c_slow = oracle::brute_force_energy(f, u, v, &allowed);
        r.record(c_fast == c_slow && c_fast <= fast,
                 "constrained " + std::to_string(c_fast) + " vs brute force " + std::to_string(c_slow));
    }
    return r;
}

// The i-th point of the uppermost geodesic has the largest b (and the i-th
// point of the lowermost the largest a) among the i-th points of all
// geodesics; and the points lying on some geodesic are exactly those with
// F + B - 1 == energy.
inline SuiteResult geodesic_extremality(std::size_t instances, std::uint64_t seed) {
    SuiteResult r{"geodesic_extremality"};
    detail::Engine e(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        const auto f = detail::small_field(e, 12);
        const auto [u, v] = detail::endpoints(e, f);
        const auto all = oracle::enumerate_geodesics(f, u, v);
        const GeodesicSolver solver(f, u, v);
        const Chain up = solver.uppermost(), low = solver.lowermost();
        bool ok = !all.empty() && up.energy() == all.front().energy() && low.energy() == up.energy();
        ok = ok && is_increasing(up) && is_increasing(low);
        for (std::size_t k = 0; ok && k < up.energy(); ++k) {
            PlanePoint hi = all.front().interior[k], lo = hi;
            for (const auto& g : all) {
                if (g.interior[k].b > hi.b) hi = g.interior[k];
                if (g.interior[k].a > lo.a) lo = g.interior[k];
            }
            ok = up.interior[k] == hi && low.interior[k] == lo;
        }
        std::set<std::pair<double, double>> on_some;
        for (const auto& g : all) {
            for (const auto& p : g.interior) on_some.insert({p.a, p.b});
        }
        std::set<std::pair<double, double>> marked;
        for (std::size_t l = 1; l <= solver.energy(); ++l) {
            for (const auto& p : solver.level(l)) marked.insert({p.a, p.b});
        }
        ok = ok && on_some == marked;
        r.record(ok, "extremal geodesic mismatch for u=" + detail::describe(u) + " v=" + detail::describe(v));
    }
    return r;
}

// Lemma-level properties on scaled fields with parameter n.
inline SuiteResult polymer_ordering(std::size_t instances, std::uint64_t seed, double n = 60.0) {
    SuiteResult r{"polymer_ordering"};
    detail::Engine e(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        const auto f = detail::scaled_field(e, n);
        const double t1 = detail::uniform(e, 0.0, 0.5), t2 = detail::uniform(e, 1.0, 1.9);
        // |x| <= 0.9 keeps every pair compatible for n >= 60
        double x1 = detail::uniform(e, -0.9, 0.9), x2 = detail::uniform(e, -0.9, 0.9);
        double y1 = detail::uniform(e, -0.9, 0.9), y2 = detail::uniform(e, -0.9, 0.9);
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        bool ok = true;
        for (Side side : {Side::leftmost, Side::rightmost}) {
            const auto p = polymer(f, n, {x1, t1}, {y1, t2}, side);
            const auto q = polymer(f, n, {x2, t1}, {y2, t2}, side);
            std::vector<double> times;
            for (int k = 0; k <= 100; ++k) times.push_back(t1 + (t2 - t1) * k / 100.0);
            for (const auto& v : p.vertices()) times.push_back(v.t);
            for (const auto& v : q.vertices()) times.push_back(v.t);
            for (double t : times) {
                t = std::clamp(t, t1, t2);
                if (p(t) > q(t) + 1e-9) ok = false;
            }
        }
        // a pair's leftmost never lies right of its rightmost
        const auto pair = polymer_pair(f, n, {x1, t1}, {y1, t2});
        for (int k = 0; k <= 100; ++k) {
            const double t = t1 + (t2 - t1) * k / 100.0;
            if (pair.leftmost(t) > pair.rightmost(t) + 1e-9) ok = false;
        }
        r.record(ok, "ordering violated at n=" + std::to_string(n));
    }
    return r;
}

inline SuiteResult sandwiching(std::size_t instances, std::uint64_t seed, double n = 60.0) {
    SuiteResult r{"sandwiching"};
    detail::Engine e(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        const auto f = detail::scaled_field(e, n);
        const double t1 = detail::uniform(e, 0.0, 0.5), t2 = detail::uniform(e, 1.0, 1.9);
        std::vector<double> xs{detail::uniform(e, -0.9, 0.9), detail::uniform(e, -0.9, 0.9), detail::uniform(e, -0.9, 0.9)};
        std::vector<double> ys{detail::uniform(e, -0.9, 0.9), detail::uniform(e, -0.9, 0.9), detail::uniform(e, -0.9, 0.9)};
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        std::vector<Polymer> rho;
        for (int k = 0; k < 3; ++k) rho.push_back(polymer(f, n, {xs[k], t1}, {ys[k], t2}, Side::leftmost));
        const double start_spread = std::max(std::abs(xs[0] - xs[1]), std::abs(xs[2] - xs[1]));
        bool ok = true;
        for (int k = 0; k <= 100; ++k) {
            const double t = t1 + (t2 - t1) * k / 100.0;
            double worst = 0.0;
            for (const auto& p : rho) worst = std::max(worst, std::abs(p(t) - p(t1)));
            if (std::abs(rho[1](t) - rho[1](t1)) > worst + start_spread + 1e-9) ok = false;
        }
        r.record(ok, "sandwich bound violated");
    }
    return r;
}

inline SuiteResult concatenation_additivity(std::size_t instances, std::uint64_t seed) {
    SuiteResult r{"concatenation_additivity"};
    detail::Engine e(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        const auto f = detail::small_field(e, 40);
        auto [u, v] = detail::endpoints(e, f);
        // the middle point is a field point half of the time
        PlanePoint w{detail::uniform(e, u.a, v.a), detail::uniform(e, u.b, v.b)};
        const auto pts = f.points();
        if (!pts.empty() && e() % 2 == 0) {
            for (std::size_t k = 0; k < 8; ++k) {
                const auto& p = pts[e() % pts.size()];
                if (dominated_by(u, p) && dominated_by(p, v)) {
                    w = p;
                    break;
                }
            }
        }
        const Chain c1 = uppermost_geodesic(f, u, w), c2 = lowermost_geodesic(f, w, v);
        const Chain c = concatenate(c1, c2);
        std::size_t field_points = 0;
        for (const auto& p : c.interior) field_points += f.contains_point(p) ? 1 : 0;
        const bool ok = c.energy() == c1.energy() + c2.energy() && field_points == c.energy() && is_increasing(c) &&
                        c.energy() <= energy(f, u, v);
        r.record(ok, "concatenation energy is not additive");
    }
    return r;
}

// X_u^w >= X_u^v + X_v^w exactly, and the scaled version up to 1e-9.
// `instances` counts compatible triples; others are redrawn.
inline SuiteResult superadditivity(std::size_t instances, std::uint64_t seed, double n = 60.0) {
    SuiteResult r{"superadditivity"};
    detail::Engine e(seed);
    for (std::size_t attempts = 0; r.instances < instances && attempts < 50 * instances; ++attempts) {
        const auto f = detail::scaled_field(e, n);
        double ts[3] = {detail::uniform(e, 0, 2), detail::uniform(e, 0, 2), detail::uniform(e, 0, 2)};
        std::sort(ts, ts + 3);
        if (!(ts[0] < ts[1] && ts[1] < ts[2])) continue;
        const ScaledPoint a{0.2 * detail::uniform(e, -1, 1), ts[0]}, b{0.2 * detail::uniform(e, -1, 1), ts[1]},
            c{0.2 * detail::uniform(e, -1, 1), ts[2]};
        if (!compatible(n, a, b) || !compatible(n, b, c)) continue;
        const PlanePoint ua = to_unscaled(n, a), ub = to_unscaled(n, b), uc = to_unscaled(n, c);
        const auto whole = energy(f, ua, uc), parts = energy(f, ua, ub) + energy(f, ub, uc);
        const double w_whole = weight(f, n, a, c), w_parts = weight(f, n, a, b) + weight(f, n, b, c);
        r.record(whole >= parts && w_whole >= w_parts - 1e-9, "superadditivity violated");
    }
    return r;
}

// Two uppermost geodesics that share field points z1 and z2 coincide
// between them. Instances without two shared points are skipped; `instances`
// counts qualifying configurations.
inline SuiteResult two_point_agreement(std::size_t instances, std::uint64_t seed, double n = 60.0) {
    SuiteResult r{"two_point_agreement"};
    detail::Engine e(seed);
    for (std::size_t attempts = 0; r.instances < instances && attempts < 50 * instances; ++attempts) {
        const auto f = detail::scaled_field(e, n);
        const ScaledPoint u1{detail::uniform(e, -0.5, 0.5), detail::uniform(e, 0, 0.3)};
        const ScaledPoint u2{detail::uniform(e, -0.5, 0.5), detail::uniform(e, 0, 0.3)};
        const ScaledPoint v1{detail::uniform(e, -0.5, 0.5), detail::uniform(e, 1.7, 2.0)};
        const ScaledPoint v2{detail::uniform(e, -0.5, 0.5), detail::uniform(e, 1.7, 2.0)};
        const Chain g1 = uppermost_geodesic(f, to_unscaled(n, u1), to_unscaled(n, v1));
        const Chain g2 = uppermost_geodesic(f, to_unscaled(n, u2), to_unscaled(n, v2));
        std::vector<PlanePoint> shared;
        for (const auto& p : g1.interior) {
            if (std::find(g2.interior.begin(), g2.interior.end(), p) != g2.interior.end()) shared.push_back(p);
        }
        if (shared.size() < 2) continue;
        const PlanePoint z1 = shared.front(), z2 = shared.back();
        auto between = [&](const Chain& g) {
            std::vector<PlanePoint> out;
            for (const auto& p : g.interior) {
                if (dominated_by(z1, p) && dominated_by(p, z2)) out.push_back(p);
            }
            return out;
        };
        r.record(between(g1) == between(g2), "geodesics differ between shared points " + detail::describe(z1) +
                                                 " and " + detail::describe(z2));
    }
    return r;
}

// Unit jumps, monotonicity, agreement with direct energy calls at random t,
// and |Wgt_n(t) - W| <= n^{-1/3} on [1, 2].
inline SuiteResult weight_profile_exactness(std::size_t fields, std::uint64_t seed, double n = 100.0,
                                            std::size_t spot_checks = 50) {
    SuiteResult r{"weight_profile_exactness"};
    detail::Engine e(seed);
    for (std::size_t i = 0; i < fields; ++i) {
        // a narrow window suffices: the profile is exact on whatever field it gets
        const auto f = sample_field(truncated_window(n, {0, 0}, {0, 2}, 0.5), 1.0, e());
        const auto prof = weight_profile(f, n);
        bool ok = true;
        std::uint32_t prev = prof.base_value;
        for (std::size_t k = 0; k < prof.jump_times.size(); ++k) {
            if (prof.values[k] != prev + 1) ok = false;
            if (k > 0 && !(prof.jump_times[k] > prof.jump_times[k - 1])) ok = false;
            prev = prof.values[k];
        }
        if (prof.base_value != energy(f, {0, 0}, {n, n})) ok = false;
        const double tol = 1.0 / std::cbrt(n) + 1e-9;
        for (std::size_t k = 0; k < spot_checks; ++k) {
            const double t = detail::uniform(e, 1.0, 2.0);
            if (prof.value(t) != energy(f, {0, 0}, {n * t, n * t})) ok = false;
            if (std::abs(eval_wgt(prof, t) - weight(f, n, {0, 0}, {0, t})) > tol) ok = false;
        }
        // the bound at the nodes and just before them, where the gap peaks
        for (const auto& [d, x] : prof.nodes()) {
            if (std::abs(eval_wgt(prof, d) - weight(f, n, {0, 0}, {0, d})) > tol) ok = false;
            const double before = std::nextafter(d, 0.0);
            if (before >= 1.0 && std::abs(eval_wgt(prof, before) - weight(f, n, {0, 0}, {0, before})) > tol) ok = false;
        }
        r.record(ok, "weight profile check failed on field " + std::to_string(i));
    }
    return r;
}

} // namespace lpp::suites
