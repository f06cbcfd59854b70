#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lpp/errors.hpp"
#include "lpp/field.hpp"
#include "lpp/geometry.hpp"

namespace lpp {

// An increasing path start ≼ p_1 ≼ ... ≼ p_k ≼ end through field points.
// The end point is never part of the interior; the start point is, when it
// is a field point the path collects. Energy is the interior size, which
// makes concatenation exactly additive.
struct Chain {
    PlanePoint start;
    PlanePoint end;
    std::vector<PlanePoint> interior;

    std::size_t energy() const { return interior.size(); }

    friend bool operator==(const Chain&, const Chain&) = default;
};

// True when start ≼ interior... ≼ end with strict increase between interior
// points and the end point excluded from the interior.
inline bool is_increasing(const Chain& chain) {
    PlanePoint prev = chain.start;
    bool first = true;
    for (const auto& p : chain.interior) {
        if (first ? !dominated_by(prev, p) : !strictly_dominated_by(prev, p)) return false;
        prev = p;
        first = false;
    }
    if (!dominated_by(prev, chain.end)) return false;
    return chain.interior.empty() || chain.interior.back() != chain.end;
}

inline Chain concatenate(const Chain& first, const Chain& second) {
    if (!(first.end == second.start)) fail(ErrorKind::invalid_argument, "concatenate: endpoint mismatch");
    Chain out{first.start, second.end, first.interior};
    out.interior.insert(out.interior.end(), second.interior.begin(), second.interior.end());
    return out;
}

namespace detail {

inline void require_ordered(const PlanePoint& u, const PlanePoint& v) {
    if (!dominated_by(u, v)) fail(ErrorKind::incomparable_endpoints, "endpoints are not ordered (u must be ≼ v)");
}

// Field points p with u ≼ p ≼ v and p != v, in increasing a, optionally
// restricted to `allowed`.
inline std::vector<PlanePoint> points_between(const PointField& field, const PlanePoint& u, const PlanePoint& v,
                                              const Region* allowed = nullptr) {
    auto [lo, hi] = field.a_slice(u.a, v.a);
    const auto pts = field.points();
    std::vector<PlanePoint> out;
    out.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        const PlanePoint& p = pts[i];
        if (p.b < u.b || p.b > v.b || p == v) continue;
        if (allowed && !allowed->contains(p)) continue;
        out.push_back(p);
    }
    return out;
}

// Index of the first tail >= x. Branch-free halving; the tail arrays here
// are small enough to stay in cache, where mispredictions dominate.
inline std::size_t first_not_less(const std::vector<double>& tails, double x) {
    std::size_t len = tails.size();
    if (len == 0) return 0;
    const double* base = tails.data();
    while (len > 1) {
        const std::size_t half = len / 2;
        base += (base[half - 1] < x) ? half : 0;
        len -= half;
    }
    return static_cast<std::size_t>(base - tails.data()) + (*base < x ? 1 : 0);
}

inline void patience_insert(std::vector<double>& tails, std::size_t at, double x) {
    if (at == tails.size()) tails.push_back(x);
    else tails[at] = x;
}

// Patience scan: length of the longest chain ending at each point,
// inclusive. Points must be sorted by a with distinct b.
inline std::vector<std::uint32_t> prefix_chain_lengths(std::span<const PlanePoint> pts) {
    std::vector<std::uint32_t> lengths(pts.size());
    std::vector<double> tails;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::size_t at = first_not_less(tails, pts[i].b);
        lengths[i] = static_cast<std::uint32_t>(at) + 1;
        patience_insert(tails, at, pts[i].b);
    }
    return lengths;
}

// Longest chain starting at each point, inclusive.
inline std::vector<std::uint32_t> suffix_chain_lengths(std::span<const PlanePoint> pts) {
    std::vector<std::uint32_t> lengths(pts.size());
    std::vector<double> tails; // of -b, scanning right to left
    for (std::size_t k = pts.size(); k-- > 0;) {
        const double key = -pts[k].b;
        const std::size_t at = first_not_less(tails, key);
        lengths[k] = static_cast<std::uint32_t>(at) + 1;
        patience_insert(tails, at, key);
    }
    return lengths;
}

inline std::size_t longest_chain(std::span<const PlanePoint> pts) {
    std::vector<double> tails;
    for (const auto& p : pts) patience_insert(tails, first_not_less(tails, p.b), p.b);
    return tails.size();
}

} // namespace detail

// Last passage value X_u^v: the most field points an increasing path from u
// to v can collect, v itself excluded.
inline std::size_t energy(const PointField& field, const PlanePoint& u, const PlanePoint& v) {
    detail::require_ordered(u, v);
    auto [lo, hi] = field.a_slice(u.a, v.a);
    const auto pts = field.points();
    std::vector<double> tails;
    for (std::size_t i = lo; i < hi; ++i) {
        const PlanePoint& p = pts[i];
        if (p.b < u.b || p.b > v.b || p == v) continue;
        detail::patience_insert(tails, detail::first_not_less(tails, p.b), p.b);
    }
    return tails.size();
}

// Energy using only field points inside `allowed`. Regions are convex, so a
// path whose vertices lie in `allowed` stays inside it.
inline std::size_t constrained_energy(const PointField& field, const PlanePoint& u, const PlanePoint& v,
                                      const Region& allowed) {
    detail::require_ordered(u, v);
    if (!allowed.contains(u) || !allowed.contains(v)) {
        fail(ErrorKind::invalid_argument, "constrained_energy: endpoints must lie in the allowed region");
    }
    return detail::longest_chain(detail::points_between(field, u, v, &allowed));
}

// Chain-length table over the field points of the rectangle [u, v].
struct LengthTable {
    std::vector<PlanePoint> points;     // increasing a
    std::vector<std::uint32_t> lengths; // aligned with points

    std::optional<std::uint32_t> at(const PlanePoint& p) const {
        auto it = std::lower_bound(points.begin(), points.end(), p.a,
                                   [](const PlanePoint& q, double a) { return q.a < a; });
        if (it == points.end() || !(*it == p)) return std::nullopt;
        return lengths[static_cast<std::size_t>(it - points.begin())];
    }
};

// F(p): longest chain from u to p, p included.
inline LengthTable forward_lengths(const PointField& field, const PlanePoint& u, const PlanePoint& v) {
    detail::require_ordered(u, v);
    LengthTable t{detail::points_between(field, u, v), {}};
    t.lengths = detail::prefix_chain_lengths(t.points);
    return t;
}

// B(p): longest chain from p towards v, p included and v excluded.
inline LengthTable backward_lengths(const PointField& field, const PlanePoint& u, const PlanePoint& v) {
    detail::require_ordered(u, v);
    LengthTable t{detail::points_between(field, u, v), {}};
    t.lengths = detail::suffix_chain_lengths(t.points);
    return t;
}

// Full dynamic program for one endpoint pair: forward and backward tables,
// the energy, and the points lying on at least one geodesic grouped by level.
// A point p lies on a geodesic iff F(p) + B(p) - 1 == energy: the longest
// chain through p counts p once in each table.
class GeodesicSolver {
public:
    GeodesicSolver(const PointField& field, const PlanePoint& u, const PlanePoint& v, const Region* allowed = nullptr)
        : u_(u), v_(v) {
        detail::require_ordered(u, v);
        points_ = detail::points_between(field, u, v, allowed);
        forward_ = detail::prefix_chain_lengths(points_);
        backward_ = detail::suffix_chain_lengths(points_);
        for (auto f : forward_) energy_ = std::max<std::size_t>(energy_, f);

        // bucket geodesic points by level; within a level they form an
        // antichain listed by increasing a (so decreasing b)
        level_start_.assign(energy_ + 2, 0);
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (on_geodesic(i)) ++level_start_[forward_[i] + 1];
        }
        for (std::size_t l = 1; l < level_start_.size(); ++l) level_start_[l] += level_start_[l - 1];
        level_points_.resize(level_start_.back());
        std::vector<std::size_t> fill(level_start_.begin(), level_start_.end() - 1);
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (on_geodesic(i)) level_points_[fill[forward_[i]]++] = points_[i];
        }
    }

    std::size_t energy() const { return energy_; }
    const PlanePoint& start() const { return u_; }
    const PlanePoint& end() const { return v_; }
    std::span<const PlanePoint> points() const { return points_; }
    std::span<const std::uint32_t> forward() const { return forward_; }
    std::span<const std::uint32_t> backward() const { return backward_; }

    // Geodesic points with forward length `level` (1-based).
    std::span<const PlanePoint> level(std::size_t level) const {
        return std::span<const PlanePoint>(level_points_).subspan(level_start_[level],
                                                                 level_start_[level + 1] - level_start_[level]);
    }

    // Greedy walk: at each level take, among geodesic points dominating the
    // current one, the one with the largest b.
    Chain uppermost() const {
        Chain c{u_, v_, {}};
        c.interior.reserve(energy_);
        PlanePoint cur = u_;
        for (std::size_t l = 1; l <= energy_; ++l) {
            auto lv = level(l);
            auto it = std::lower_bound(lv.begin(), lv.end(), cur.a,
                                       [](const PlanePoint& p, double a) { return p.a < a; });
            if (it == lv.end() || it->b < cur.b) fail(ErrorKind::infeasible, "uppermost walk lost the geodesic");
            cur = *it;
            c.interior.push_back(cur);
        }
        return c;
    }

    // Dual walk: the successor with the largest a.
    Chain lowermost() const {
        Chain c{u_, v_, {}};
        c.interior.reserve(energy_);
        PlanePoint cur = u_;
        for (std::size_t l = 1; l <= energy_; ++l) {
            auto lv = level(l);
            // b decreases along the level: first point with b < cur.b ends the range
            auto it = std::lower_bound(lv.begin(), lv.end(), cur.b,
                                       [](const PlanePoint& p, double b) { return p.b >= b; });
            if (it == lv.begin() || std::prev(it)->a < cur.a) {
                fail(ErrorKind::infeasible, "lowermost walk lost the geodesic");
            }
            cur = *std::prev(it);
            c.interior.push_back(cur);
        }
        return c;
    }

    // min over geodesics of max over their interior points of cost(p).
    // Returns 0 for an empty geodesic.
    template <class Cost>
    double bottleneck(Cost&& cost) const {
        if (energy_ == 0) return 0.0;
        std::vector<double> prev_best, best;
        std::span<const PlanePoint> prev_level;
        for (std::size_t l = 1; l <= energy_; ++l) {
            auto lv = level(l);
            best.assign(lv.size(), std::numeric_limits<double>::infinity());
            for (std::size_t i = 0; i < lv.size(); ++i) {
                double reach = 0.0;
                if (l > 1) {
                    reach = std::numeric_limits<double>::infinity();
                    for (std::size_t j = 0; j < prev_level.size(); ++j) {
                        if (prev_level[j].a > lv[i].a) break;
                        if (prev_level[j].b <= lv[i].b) reach = std::min(reach, prev_best[j]);
                    }
                }
                best[i] = std::max(reach, static_cast<double>(cost(lv[i])));
            }
            prev_best.swap(best);
            prev_level = lv;
        }
        return *std::min_element(prev_best.begin(), prev_best.end());
    }

private:
    bool on_geodesic(std::size_t i) const {
        return static_cast<std::size_t>(forward_[i]) + backward_[i] - 1 == energy_;
    }

    PlanePoint u_, v_;
    std::vector<PlanePoint> points_;
    std::vector<std::uint32_t> forward_, backward_;
    std::size_t energy_ = 0;
    std::vector<std::size_t> level_start_;
    std::vector<PlanePoint> level_points_;
};

inline Chain uppermost_geodesic(const PointField& field, const PlanePoint& u, const PlanePoint& v) {
    return GeodesicSolver(field, u, v).uppermost();
}

inline Chain lowermost_geodesic(const PointField& field, const PlanePoint& u, const PlanePoint& v) {
    return GeodesicSolver(field, u, v).lowermost();
}

} // namespace lpp
