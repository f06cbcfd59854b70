#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lpp/errors.hpp"

namespace lpp {

// A point of the unscaled plane. `a` is the horizontal coordinate, `b` the
// vertical one.
struct PlanePoint {
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

// Coordinatewise order: p ≼ q iff p.a <= q.a and p.b <= q.b. No tolerance is
// applied anywhere; the field is in general position.
inline bool dominated_by(const PlanePoint& p, const PlanePoint& q) {
    return p.a <= q.a && p.b <= q.b;
}

inline bool strictly_dominated_by(const PlanePoint& p, const PlanePoint& q) {
    return p.a < q.a && p.b < q.b;
}

// Axis-aligned rectangle [a_lo, a_hi] x [b_lo, b_hi].
struct Rectangle {
    double a_lo, a_hi, b_lo, b_hi;
};

// A box in rotated coordinates: sum_lo <= a + b <= sum_hi and
// diff_lo <= a - b <= diff_hi, intersected with an axis-aligned clip box
// (unbounded by default). Scaled time is proportional to a + b and scaled
// space to a - b, so the unclipped shape is a vertical box in scaled
// coordinates.
struct DiagonalStrip {
    double sum_lo, sum_hi, diff_lo, diff_hi;
    Rectangle clip{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
};

namespace detail {

// Area of the rectangle [a0,a1] x [b0,b1] cut by the four rotated half-planes.
inline double clipped_band_area(const DiagonalStrip& s, double a0, double a1, double b0, double b1) {
    if (!(a1 > a0) || !(b1 > b0)) return 0.0;
    std::vector<std::pair<double, double>> poly{{a0, b0}, {a1, b0}, {a1, b1}, {a0, b1}};
    // keep points with sign * (a + dir * b) >= bound
    auto cut = [&poly](double dir, double sign, double bound) {
        std::vector<std::pair<double, double>> out;
        auto value = [&](const std::pair<double, double>& p) { return sign * (p.first + dir * p.second) - bound; };
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const auto& p = poly[i];
            const auto& q = poly[(i + 1) % poly.size()];
            const double vp = value(p), vq = value(q);
            if (vp >= 0) out.push_back(p);
            if ((vp >= 0) != (vq >= 0)) {
                const double w = vp / (vp - vq);
                out.emplace_back(p.first + w * (q.first - p.first), p.second + w * (q.second - p.second));
            }
        }
        poly = std::move(out);
    };
    cut(1.0, 1.0, s.sum_lo);
    cut(1.0, -1.0, -s.sum_hi);
    cut(-1.0, 1.0, s.diff_lo);
    cut(-1.0, -1.0, -s.diff_hi);
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        twice += p.first * q.second - q.first * p.second;
    }
    return 0.5 * std::abs(twice);
}

} // namespace detail

class Region {
public:
    using Shape = std::variant<Rectangle, DiagonalStrip>;

    static Region rectangle(double a_lo, double a_hi, double b_lo, double b_hi) {
        return Region(Rectangle{a_lo, a_hi, b_lo, b_hi});
    }

    // {0 <= a + b <= 2 n t_max, |a - b| <= 2 half_width} clipped to the
    // quadrant a, b >= 0 of paths leaving the origin.
    static Region diagonal_strip(double n, double t_max, double half_width) {
        require(n > 0 && t_max > 0, ErrorKind::invalid_region, "diagonal strip needs n > 0 and t_max > 0");
        require(half_width > 0, ErrorKind::invalid_region, "diagonal strip needs half_width > 0");
        const double far = 2.0 * n * t_max;
        return Region(DiagonalStrip{0.0, far, -2.0 * half_width, 2.0 * half_width, Rectangle{0.0, far, 0.0, far}});
    }

    static Region diagonal_band(double sum_lo, double sum_hi, double diff_lo, double diff_hi) {
        return Region(DiagonalStrip{sum_lo, sum_hi, diff_lo, diff_hi});
    }

    // The band intersected with an axis-aligned box.
    static Region clipped_band(double sum_lo, double sum_hi, double diff_lo, double diff_hi, const Rectangle& clip) {
        return Region(DiagonalStrip{sum_lo, sum_hi, diff_lo, diff_hi, clip});
    }

    const Shape& shape() const { return shape_; }
    bool is_rectangle() const { return std::holds_alternative<Rectangle>(shape_); }

    double area() const {
        return std::visit(
            [](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Rectangle>) {
                    return (s.a_hi - s.a_lo) * (s.b_hi - s.b_lo);
                } else {
                    const auto [a0, a1] = strip_a_range(s);
                    const auto [b0, b1] = strip_b_range(s);
                    return detail::clipped_band_area(s, a0, a1, b0, b1);
                }
            },
            shape_);
    }

    // Closed-set membership.
    bool contains(const PlanePoint& p) const {
        return std::visit(
            [&](const auto& s) -> bool {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Rectangle>) {
                    return p.a >= s.a_lo && p.a <= s.a_hi && p.b >= s.b_lo && p.b <= s.b_hi;
                } else {
                    const double sum = p.a + p.b;
                    const double diff = p.a - p.b;
                    return sum >= s.sum_lo && sum <= s.sum_hi && diff >= s.diff_lo && diff <= s.diff_hi &&
                           p.a >= s.clip.a_lo && p.a <= s.clip.a_hi && p.b >= s.clip.b_lo && p.b <= s.clip.b_hi;
                }
            },
            shape_);
    }

    // Horizontal extent of the region.
    std::pair<double, double> a_range() const {
        return std::visit(
            [](const auto& s) -> std::pair<double, double> {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Rectangle>) {
                    return {s.a_lo, s.a_hi};
                } else {
                    return strip_a_range(s);
                }
            },
            shape_);
    }

    // Vertical section {b : (a, b) in region}; empty when first > second.
    std::pair<double, double> section(double a) const {
        return std::visit(
            [a](const auto& s) -> std::pair<double, double> {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Rectangle>) {
                    return {s.b_lo, s.b_hi};
                } else {
                    if (a < s.clip.a_lo || a > s.clip.a_hi) return {1.0, 0.0};
                    return {std::max({a - s.diff_hi, s.sum_lo - a, s.clip.b_lo}),
                            std::min({a - s.diff_lo, s.sum_hi - a, s.clip.b_hi})};
                }
            },
            shape_);
    }

    // Smallest interval containing every section over a in [a0, a1].
    std::pair<double, double> section_hull(double a0, double a1) const {
        return std::visit(
            [&](const auto& s) -> std::pair<double, double> {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Rectangle>) {
                    return {s.b_lo, s.b_hi};
                } else {
                    // the lower boundary is convex and the upper concave in a,
                    // so extremes sit at the interval ends or at a kink
                    const auto [r0, r1] = strip_a_range(s);
                    const double lo_a = std::max(a0, r0), hi_a = std::min(a1, r1);
                    if (!(hi_a >= lo_a)) return {1.0, 0.0};
                    double lo = std::numeric_limits<double>::infinity();
                    double hi = -lo;
                    for (double k : {lo_a, hi_a, 0.5 * (s.sum_lo + s.diff_hi), s.sum_lo - s.clip.b_lo,
                                     s.diff_hi + s.clip.b_lo, 0.5 * (s.sum_hi + s.diff_lo), s.sum_hi - s.clip.b_hi,
                                     s.diff_lo + s.clip.b_hi}) {
                        if (!std::isfinite(k)) continue;
                        const auto [l, h] = section(std::clamp(k, lo_a, hi_a));
                        lo = std::min(lo, l);
                        hi = std::max(hi, h);
                    }
                    return {lo, hi};
                }
            },
            shape_);
    }

    std::string kind_name() const { return is_rectangle() ? "rectangle" : "diagonal_strip"; }

private:
    static std::pair<double, double> strip_a_range(const DiagonalStrip& s) {
        return {std::max(0.5 * (s.sum_lo + s.diff_lo), s.clip.a_lo), std::min(0.5 * (s.sum_hi + s.diff_hi), s.clip.a_hi)};
    }

    static std::pair<double, double> strip_b_range(const DiagonalStrip& s) {
        return {std::max(0.5 * (s.sum_lo - s.diff_hi), s.clip.b_lo), std::min(0.5 * (s.sum_hi - s.diff_lo), s.clip.b_hi)};
    }

    explicit Region(Shape shape) : shape_(shape) {
        const double area_value = area();
        if (!(area_value > 0) || !std::isfinite(area_value)) {
            fail(ErrorKind::invalid_region, "region must have finite positive area");
        }
    }

    Shape shape_;
};

} // namespace lpp
