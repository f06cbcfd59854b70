#pragma once

// Exhaustive reference implementations. Nothing here calls into chains.hpp
// apart from the Chain type itself.

#include <cstdint>
#include <vector>

#include "lpp/chains.hpp"
#include "lpp/errors.hpp"
#include "lpp/field.hpp"

namespace lpp::oracle {

inline constexpr std::size_t max_points = 16;

namespace detail {

inline std::vector<PlanePoint> candidates(const PointField& field, const PlanePoint& u, const PlanePoint& v,
                                          const Region* allowed) {
    if (!(u.a <= v.a && u.b <= v.b)) fail(ErrorKind::incomparable_endpoints, "oracle: u must be ≼ v");
    std::vector<PlanePoint> out;
    for (const auto& p : field.points()) {
        const bool inside = u.a <= p.a && p.a <= v.a && u.b <= p.b && p.b <= v.b && !(p.a == v.a && p.b == v.b);
        if (inside && (allowed == nullptr || allowed->contains(p))) out.push_back(p);
    }
    if (out.size() > max_points) fail(ErrorKind::too_many_points, "oracle: too many points in rectangle");
    return out;
}

// Subsets (as bitmasks over `pts`, which are sorted by a) forming a chain.
inline bool is_chain(const std::vector<PlanePoint>& pts, std::uint32_t mask) {
    bool have_prev = false;
    PlanePoint prev{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(mask >> i & 1u)) continue;
        if (have_prev && !(prev.a <= pts[i].a && prev.b <= pts[i].b)) return false;
        prev = pts[i];
        have_prev = true;
    }
    return true;
}

} // namespace detail

// Maximum chain size over every subset of the field points in [u, v] \ {v}.
inline std::size_t brute_force_energy(const PointField& field, const PlanePoint& u, const PlanePoint& v,
                                      const Region* allowed = nullptr) {
    const auto pts = detail::candidates(field, u, v, allowed);
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << pts.size()); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (size > best && detail::is_chain(pts, mask)) best = size;
    }
    return best;
}

// Every maximizing chain, in increasing mask order.
inline std::vector<Chain> enumerate_geodesics(const PointField& field, const PlanePoint& u, const PlanePoint& v) {
    const auto pts = detail::candidates(field, u, v, nullptr);
    const std::size_t best = brute_force_energy(field, u, v);
    std::vector<Chain> out;
    for (std::uint32_t mask = 0; mask < (1u << pts.size()); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != best || !detail::is_chain(pts, mask)) continue;
        Chain c{u, v, {}};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (mask >> i & 1u) c.interior.push_back(pts[i]);
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace lpp::oracle
