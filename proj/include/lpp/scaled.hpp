#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "lpp/chains.hpp"
#include "lpp/errors.hpp"
#include "lpp/field.hpp"
#include "lpp/geometry.hpp"

namespace lpp {

// KPZ-scaled coordinates: x is transversal, t is time.
struct ScaledPoint {
    double x = 0.0;
    double t = 0.0;

    friend bool operator==(const ScaledPoint&, const ScaledPoint&) = default;
};

// (x, t) -> (nt + x n^{2/3}, nt - x n^{2/3})
inline PlanePoint to_unscaled(double n, const ScaledPoint& p) {
    const double shift = p.x * std::cbrt(n * n);
    return {n * p.t + shift, n * p.t - shift};
}

// (a, b) -> ((a - b) / (2 n^{2/3}), (a + b) / (2 n))
inline ScaledPoint to_scaled(double n, const PlanePoint& p) {
    return {(p.a - p.b) / (2.0 * std::cbrt(n * n)), (p.a + p.b) / (2.0 * n)};
}

// Polymers exist between u and v iff |u.x - v.x| < n^{1/3} (v.t - u.t).
inline bool compatible(double n, const ScaledPoint& u, const ScaledPoint& v) {
    require(n > 0, ErrorKind::invalid_argument, "n must be positive");
    if (!(u.t < v.t)) fail(ErrorKind::invalid_argument, "compatible: need u.t < v.t");
    return std::abs(u.x - v.x) < std::cbrt(n) * (v.t - u.t);
}

// Region {t_lo <= t <= t_hi, x_lo <= x <= x_hi} in unscaled coordinates.
inline Region scaled_box(double n, double t_lo, double t_hi, double x_lo, double x_hi) {
    const double n23 = std::cbrt(n * n);
    return Region::diagonal_band(2.0 * n * t_lo, 2.0 * n * t_hi, 2.0 * x_lo * n23, 2.0 * x_hi * n23);
}

// Sampling window for geodesics from u to v: the rectangle [T_n^{-1} u,
// T_n^{-1} v] cut down to scaled distance k_trunc (v.t - u.t)^{2/3} around
// the horizontal range of the endpoints. Padded by a relative 1e-12 so the
// endpoints themselves survive rounding.
inline Region truncated_window(double n, const ScaledPoint& u, const ScaledPoint& v, double k_trunc) {
    require(n > 0, ErrorKind::invalid_argument, "n must be positive");
    require(u.t < v.t, ErrorKind::invalid_argument, "window needs u.t < v.t");
    require(k_trunc > 0, ErrorKind::invalid_argument, "k_trunc must be positive");
    const PlanePoint lo = to_unscaled(n, u), hi = to_unscaled(n, v);
    const double pad = 1e-12 * (1.0 + std::max({std::abs(lo.a), std::abs(lo.b), std::abs(hi.a), std::abs(hi.b)}));
    const double n23 = std::cbrt(n * n);
    const double reach = k_trunc * std::pow(v.t - u.t, 2.0 / 3.0);
    const double x_lo = std::min(u.x, v.x) - reach, x_hi = std::max(u.x, v.x) + reach;
    return Region::clipped_band(lo.a + lo.b - pad, hi.a + hi.b + pad, 2.0 * x_lo * n23 - pad, 2.0 * x_hi * n23 + pad,
                                Rectangle{lo.a - pad, hi.a + pad, lo.b - pad, hi.b + pad});
}

enum class Side { leftmost, rightmost };

inline const char* to_string(Side side) { return side == Side::leftmost ? "leftmost" : "rightmost"; }

// Image under T_n of an extremal geodesic, stored as scaled vertices
// (endpoints included) ordered by time.
class Polymer {
public:
    Polymer(double n, Side side, Chain chain) : n_(n), side_(side), chain_(std::make_shared<const Chain>(std::move(chain))) {
        start_ = to_scaled(n, chain_->start);
        end_ = to_scaled(n, chain_->end);
        vertices_.reserve(chain_->interior.size() + 2);
        vertices_.push_back(start_);
        for (const auto& p : chain_->interior) {
            if (p == chain_->start) continue;
            vertices_.push_back(to_scaled(n, p));
        }
        vertices_.push_back(end_);
    }

    double n() const { return n_; }
    Side side() const { return side_; }
    const ScaledPoint& start() const { return start_; }
    const ScaledPoint& end() const { return end_; }
    std::span<const ScaledPoint> vertices() const { return vertices_; }
    // The unscaled geodesic this polymer was built from.
    const Chain& chain() const { return *chain_; }

    // Straight line between the endpoints, evaluated at time t.
    double chord(double t) const {
        const double span = end_.t - start_.t;
        return start_.x + (end_.x - start_.x) * ((t - start_.t) / span);
    }

    double operator()(double t) const {
        // times within rounding of the lifetime ends are snapped onto them
        const double slack = 1e-12 * (1.0 + std::abs(t));
        if (!(t >= start_.t - slack && t <= end_.t + slack)) {
            fail(ErrorKind::invalid_argument, "polymer evaluated outside its lifetime");
        }
        t = std::clamp(t, start_.t, end_.t);
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), t,
                                   [](const ScaledPoint& p, double time) { return p.t < time; });
        if (it == vertices_.begin()) return it->x;
        const ScaledPoint& hi = *it;
        const ScaledPoint& lo = *std::prev(it);
        if (hi.t == t) return hi.x;
        return lo.x + (hi.x - lo.x) * ((t - lo.t) / (hi.t - lo.t));
    }

private:
    double n_;
    Side side_;
    std::shared_ptr<const Chain> chain_;
    ScaledPoint start_, end_;
    std::vector<ScaledPoint> vertices_;
};

inline double eval_polymer(const Polymer& p, double t) { return p(t); }

namespace detail {

struct ScaledEndpoints {
    PlanePoint u, v;
};

inline ScaledEndpoints unscale_checked(const PointField& field, double n, const ScaledPoint& u, const ScaledPoint& v) {
    if (!compatible(n, u, v)) fail(ErrorKind::incompatible_endpoints, "endpoints are not n-compatible");
    ScaledEndpoints e{to_unscaled(n, u), to_unscaled(n, v)};
    if (!field.region().contains(e.u) || !field.region().contains(e.v)) {
        fail(ErrorKind::region_too_small, "field region does not cover the polymer endpoints");
    }
    return e;
}

} // namespace detail

// Polymer with the given side between scaled points, computed on `field`.
inline Polymer polymer(const PointField& field, double n, const ScaledPoint& u, const ScaledPoint& v, Side side) {
    auto e = detail::unscale_checked(field, n, u, v);
    GeodesicSolver solver(field, e.u, e.v);
    return Polymer(n, side, side == Side::leftmost ? solver.uppermost() : solver.lowermost());
}

// Both extremal polymers from a single dynamic program.
struct PolymerPair {
    Polymer leftmost;
    Polymer rightmost;
    std::size_t energy;
};

inline PolymerPair polymer_pair(const PointField& field, double n, const ScaledPoint& u, const ScaledPoint& v) {
    auto e = detail::unscale_checked(field, n, u, v);
    GeodesicSolver solver(field, e.u, e.v);
    return {Polymer(n, Side::leftmost, solver.uppermost()), Polymer(n, Side::rightmost, solver.lowermost()),
            solver.energy()};
}

// n^{-1/3} (energy - 2 n Δt)
inline double weight_from_energy(double n, std::size_t energy, double lifetime) {
    return (static_cast<double>(energy) - 2.0 * n * lifetime) / std::cbrt(n);
}

inline double weight(const PointField& field, double n, const ScaledPoint& u, const ScaledPoint& v) {
    auto e = detail::unscale_checked(field, n, u, v);
    return weight_from_energy(n, energy(field, e.u, e.v), v.t - u.t);
}

// sup_t |ρ(t) - chord(t)|. Both curves are linear between the polymer's
// vertices, so the supremum sits at a vertex.
inline double transversal_fluctuation(const Polymer& p) {
    double best = 0.0;
    for (const auto& q : p.vertices()) best = std::max(best, std::abs(q.x - p.chord(q.t)));
    return best;
}

inline double tf_between(const PointField& field, double n, const ScaledPoint& u, const ScaledPoint& v) {
    auto pair = polymer_pair(field, n, u, v);
    return std::max(transversal_fluctuation(pair.leftmost), transversal_fluctuation(pair.rightmost));
}

// True iff every geodesic from (0,t1) to (0,t2) leaves the closed strip
// [-s, s] x [t1, t2], decided by comparing the strip-constrained energy with
// the free one.
inline bool min_tf_exceeds(const PointField& field, double n, double t1, double t2, double s) {
    require(s > 0, ErrorKind::invalid_argument, "min_tf_exceeds: s must be positive");
    const ScaledPoint u{0.0, t1}, v{0.0, t2};
    auto e = detail::unscale_checked(field, n, u, v);
    const Region strip = scaled_box(n, t1, t2, -s, s);
    return constrained_energy(field, e.u, e.v, strip) < energy(field, e.u, e.v);
}

// min over all geodesics between u and v of their transversal fluctuation,
// solved as a bottleneck path over the geodesic points. For vertical chords
// min_tf_exceeds(s) == (min_tf > s).
inline double min_tf(const GeodesicSolver& solver, double n) {
    const ScaledPoint su = to_scaled(n, solver.start());
    const ScaledPoint sv = to_scaled(n, solver.end());
    const double span = sv.t - su.t;
    return solver.bottleneck([&](const PlanePoint& p) {
        const ScaledPoint q = to_scaled(n, p);
        return std::abs(q.x - (su.x + (sv.x - su.x) * ((q.t - su.t) / span)));
    });
}

inline double min_tf(const PointField& field, double n, const ScaledPoint& u, const ScaledPoint& v) {
    auto e = detail::unscale_checked(field, n, u, v);
    return min_tf(GeodesicSolver(field, e.u, e.v), n);
}

// Lower bound for the maximum transversal fluctuation over admissible
// endpoint pairs: both endpoints in [-1,1] x [0,1], time gap in (0, t],
// |inverse slope| <= psi. Endpoints range over the mesh
// {(j h_x, i h_t)} with h_t = t / refine and h_x = t^{2/3} / refine. Meshes
// for refine and 2 refine are nested, so the estimate is monotone under
// doubling.
inline double mtf_estimate(const PointField& field, double n, double t, double psi, int refine) {
    require(t > 0 && t <= 1, ErrorKind::invalid_argument, "mtf_estimate: t must lie in (0, 1]");
    require(psi > 0, ErrorKind::invalid_argument, "mtf_estimate: psi must be positive");
    require(refine >= 1, ErrorKind::invalid_argument, "mtf_estimate: refine must be >= 1");
    require(n > psi * psi * psi, ErrorKind::invalid_argument, "mtf_estimate: need n > psi^3");

    // mesh values are base * (k / refine); the ratio is correctly rounded, so
    // refine and 2 refine produce bit-identical shared nodes
    const double x_base = std::pow(t, 2.0 / 3.0);
    const long time_steps = static_cast<long>(std::floor(refine / t + 1e-9));
    const long x_steps = static_cast<long>(std::floor(refine / x_base + 1e-9));
    auto node = [refine](double base, long k) { return base * (static_cast<double>(k) / refine); };

    double best = 0.0;
    for (long i1 = 0; i1 <= time_steps; ++i1) {
        const double t1 = node(t, i1);
        for (long gap = 1; gap <= refine && i1 + gap <= time_steps; ++gap) {
            const double t2 = node(t, i1 + gap);
            if (t2 > 1.0) break;
            for (long j1 = -x_steps; j1 <= x_steps; ++j1) {
                const double x1 = node(x_base, j1);
                if (std::abs(x1) > 1.0) continue;
                for (long j2 = -x_steps; j2 <= x_steps; ++j2) {
                    const double x2 = node(x_base, j2);
                    if (std::abs(x2) > 1.0 || std::abs(x2 - x1) > psi * (t2 - t1)) continue;
                    best = std::max(best, tf_between(field, n, {x1, t1}, {x2, t2}));
                }
            }
        }
    }
    return best;
}

} // namespace lpp
