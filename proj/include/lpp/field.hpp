#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "lpp/errors.hpp"
#include "lpp/geometry.hpp"

namespace lpp {

class PointField;

template <class Engine = std::mt19937_64>
PointField sample_field(const Region& region, double rate, std::uint64_t seed);

// A realized Poisson cloud. Points are sorted by a, strictly; no two points
// share an a- or a b-coordinate. Immutable once built.
class PointField {
public:
    // Validates an externally supplied point set. Points may come in any
    // order; coordinate collisions and points outside the region are
    // rejected rather than repaired.
    static PointField from_points(std::vector<PlanePoint> points, Region region, std::uint64_t seed = 0,
                                  double rate = 1.0) {
        require(rate > 0, ErrorKind::invalid_argument, "rate must be positive");
        std::sort(points.begin(), points.end(), [](const PlanePoint& p, const PlanePoint& q) {
            return p.a < q.a || (p.a == q.a && p.b < q.b);
        });
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!std::isfinite(points[i].a) || !std::isfinite(points[i].b)) {
                fail(ErrorKind::invalid_argument, "non-finite coordinate in field");
            }
            if (!region.contains(points[i])) fail(ErrorKind::invalid_argument, "field point outside region");
            if (i > 0 && points[i].a == points[i - 1].a) {
                fail(ErrorKind::invalid_argument, "two field points share an a-coordinate");
            }
        }
        if (has_duplicate_b(points)) fail(ErrorKind::invalid_argument, "two field points share a b-coordinate");
        return PointField(std::move(points), region, seed, rate);
    }

    static PointField empty(Region region, std::uint64_t seed = 0, double rate = 1.0) {
        return PointField({}, region, seed, rate);
    }

    std::span<const PlanePoint> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    const Region& region() const { return region_; }
    std::uint64_t seed() const { return seed_; }
    double rate() const { return rate_; }

    // Index range of points with a in [a_lo, a_hi].
    std::pair<std::size_t, std::size_t> a_slice(double a_lo, double a_hi) const {
        auto first = std::lower_bound(points_.begin(), points_.end(), a_lo,
                                      [](const PlanePoint& p, double a) { return p.a < a; });
        auto last = std::upper_bound(first, points_.end(), a_hi,
                                     [](double a, const PlanePoint& p) { return a < p.a; });
        return {static_cast<std::size_t>(first - points_.begin()), static_cast<std::size_t>(last - points_.begin())};
    }

    bool contains_point(const PlanePoint& p) const {
        auto [lo, hi] = a_slice(p.a, p.a);
        return lo != hi && points_[lo] == p;
    }

    template <class Engine>
    friend PointField sample_field(const Region& region, double rate, std::uint64_t seed);

private:
    PointField(std::vector<PlanePoint> points, Region region, std::uint64_t seed, double rate)
        : points_(std::move(points)), region_(region), seed_(seed), rate_(rate) {}

    static bool has_duplicate_b(const std::vector<PlanePoint>& points) {
        std::vector<double> bs(points.size());
        std::transform(points.begin(), points.end(), bs.begin(), [](const PlanePoint& p) { return p.b; });
        std::sort(bs.begin(), bs.end());
        return std::adjacent_find(bs.begin(), bs.end()) != bs.end();
    }

    std::vector<PlanePoint> points_;
    Region region_;
    std::uint64_t seed_;
    double rate_;
};

namespace detail {

// 53-bit uniform on [0, 1). Written out so the stream of variates depends
// only on the engine, not on the standard library's distribution code.
template <class Engine>
inline double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <class Engine>
inline double exponential(Engine& engine, double rate) {
    return -std::log1p(-uniform01(engine)) / rate;
}

// Indices of points whose b equals that of an earlier point (in index
// order), or nullopt if all b are distinct. Equal values always share a
// bucket, so a linear bucket pass replaces a full sort.
inline std::optional<std::vector<std::size_t>> b_collisions(const std::vector<PlanePoint>& points) {
    const std::size_t m = points.size();
    if (m < 2) return std::nullopt;
    double lo = points[0].b, hi = points[0].b;
    for (const auto& p : points) {
        lo = std::min(lo, p.b);
        hi = std::max(hi, p.b);
    }
    if (lo == hi) {
        std::vector<std::size_t> all(m - 1);
        for (std::size_t i = 1; i < m; ++i) all[i - 1] = i;
        return all;
    }
    const double scale = static_cast<double>(m) / (hi - lo);
    auto bucket = [&](double b) { return std::min(m - 1, static_cast<std::size_t>((b - lo) * scale)); };
    std::vector<std::uint32_t> start(m + 1, 0);
    for (const auto& p : points) ++start[bucket(p.b) + 1];
    for (std::size_t k = 1; k <= m; ++k) start[k] += start[k - 1];
    std::vector<std::uint32_t> order(m);
    {
        std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < m; ++i) order[fill[bucket(points[i].b)]++] = static_cast<std::uint32_t>(i);
    }
    std::vector<std::size_t> clash;
    for (std::size_t k = 0; k < m; ++k) {
        for (std::uint32_t x = start[k]; x < start[k + 1]; ++x) {
            for (std::uint32_t y = start[k]; y < x; ++y) {
                if (points[order[x]].b == points[order[y]].b) {
                    clash.push_back(std::max(order[x], order[y]));
                    break;
                }
            }
        }
    }
    if (clash.empty()) return std::nullopt;
    return clash;
}

} // namespace detail

// Expected number of points of a rate-`rate` field on `region`.
inline double expected_point_count(const Region& region, double rate) { return rate * region.area(); }

// Homogeneous Poisson field on `region`. The horizontal coordinates are
// produced in increasing order as a thinned one-dimensional Poisson process
// over slabs, each slab using the hull of the region's sections, so no
// global sort is needed. Output is a pure function of (region, rate, seed).
template <class Engine>
PointField sample_field(const Region& region, double rate, std::uint64_t seed) {
    require(rate > 0 && std::isfinite(rate), ErrorKind::invalid_argument, "rate must be positive and finite");
    Engine engine(seed);

    const auto [a_min, a_max] = region.a_range();
    std::size_t slabs = 1;
    if (!region.is_rectangle()) {
        const auto& s = std::get<DiagonalStrip>(region.shape());
        const double w = std::min(s.diff_hi - s.diff_lo, s.sum_hi - s.sum_lo) / 32.0;
        slabs = static_cast<std::size_t>(std::clamp(std::ceil((a_max - a_min) / w), 1.0, 1.0e6));
    }
    const double slab_width = (a_max - a_min) / static_cast<double>(slabs);

    std::vector<PlanePoint> points;
    points.reserve(static_cast<std::size_t>(expected_point_count(region, rate) * 1.01 + 16));

    for (std::size_t k = 0; k < slabs; ++k) {
        const double a0 = a_min + slab_width * static_cast<double>(k);
        const double a1 = (k + 1 == slabs) ? a_max : a_min + slab_width * static_cast<double>(k + 1);
        const auto [hull_lo, hull_hi] = region.section_hull(a0, a1);
        if (!(hull_hi > hull_lo)) continue;
        const double intensity = rate * (hull_hi - hull_lo);
        double a = a0;
        while (true) {
            const double next = a + detail::exponential(engine, intensity);
            if (next >= a1) break;
            if (next == a || (!points.empty() && next == points.back().a)) continue;
            a = next;
            const double b = hull_lo + (hull_hi - hull_lo) * detail::uniform01(engine);
            const auto [lo, hi] = region.section(a);
            if (b >= lo && b <= hi) points.push_back({a, b});
        }
    }

    // Horizontal coordinates are distinct by construction; vertical ones are
    // checked and any colliding point is redrawn within its own section.
    while (auto clash = detail::b_collisions(points)) {
        for (std::size_t i : *clash) {
            const auto [lo, hi] = region.section(points[i].a);
            points[i].b = lo + (hi - lo) * detail::uniform01(engine);
        }
    }

    return PointField(std::move(points), region, seed, rate);
}

} // namespace lpp
