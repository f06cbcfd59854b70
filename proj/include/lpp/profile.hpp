#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lpp/chains.hpp"
#include "lpp/errors.hpp"
#include "lpp/field.hpp"

namespace lpp {

// Jump structure of X_n(t) = X_{(0,0)}^{(nt,nt)} on [1, 2].
//
// X_n is integer valued, non-decreasing and right-continuous; it equals
// base_value on [1, d_1) and values[i] on [d_{i+1}, d_{i+2}) (0-based i).
// The continuous modification interpolates linearly between consecutive
// nodes 1 = d_0 < d_1 < ... < d_{m-1} < d_m = 2.
struct WeightProfile {
    double n = 0.0;
    std::uint32_t base_value = 0;        // X_n(1)
    std::vector<double> jump_times;      // d_1 < ... < d_{m-1}, all in (1, 2]
    std::vector<std::uint32_t> values;   // X_n(d_i)
    std::uint64_t field_seed = 0;

    // X_n(t) itself, for t in [1, 2].
    std::uint32_t value(double t) const {
        auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
        if (it == jump_times.begin()) return base_value;
        return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
    }

    // Interpolation nodes (d_i, X_n(d_i)) including d_0 = 1 and d_m = 2.
    std::vector<std::pair<double, double>> nodes() const {
        std::vector<std::pair<double, double>> out;
        out.reserve(jump_times.size() + 2);
        out.emplace_back(1.0, static_cast<double>(base_value));
        for (std::size_t i = 0; i < jump_times.size(); ++i) {
            if (jump_times[i] == 2.0) continue;
            out.emplace_back(jump_times[i], static_cast<double>(values[i]));
        }
        out.emplace_back(2.0, static_cast<double>(value(2.0)));
        return out;
    }
};

// Built without a time grid: the forward chain length L(p) is computed for
// every field point in [0, 2n]^2, and the first time level ℓ is reached is
// T_ℓ = min{max(a_p, b_p) / n : L(p) = ℓ}. T_ℓ is increasing in ℓ, which is
// why every jump of X_n has size one.
inline WeightProfile weight_profile(const PointField& field, double n) {
    require(n > 0, ErrorKind::invalid_argument, "weight_profile: n must be positive");
    const PlanePoint origin{0.0, 0.0}, far{2.0 * n, 2.0 * n};
    if (!field.region().contains(origin) || !field.region().contains(far)) {
        fail(ErrorKind::region_too_small, "weight_profile: field must cover (0,0) and (2n,2n)");
    }
    const auto pts = detail::points_between(field, origin, far);
    const auto lengths = detail::prefix_chain_lengths(pts);

    std::vector<double> first_time;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double m = std::max(pts[i].a, pts[i].b) / n;
        const std::size_t level = lengths[i];
        if (first_time.size() < level) first_time.resize(level, 3.0);
        first_time[level - 1] = std::min(first_time[level - 1], m);
    }

    WeightProfile profile;
    profile.n = n;
    profile.field_seed = field.seed();
    for (std::size_t l = 0; l < first_time.size(); ++l) {
        const double when = first_time[l];
        if (when <= 1.0) {
            profile.base_value = static_cast<std::uint32_t>(l + 1);
        } else if (when <= 2.0) {
            profile.jump_times.push_back(when);
            profile.values.push_back(static_cast<std::uint32_t>(l + 1));
        }
    }
    return profile;
}

// Modified weight Wgt_n(t) = n^{-1/3} (X_n^mod(t) - 2 n t), t in [1, 2].
inline double eval_wgt(const WeightProfile& profile, double t) {
    if (!(t >= 1.0 && t <= 2.0)) fail(ErrorKind::invalid_argument, "eval_wgt: t must lie in [1, 2]");
    const auto& d = profile.jump_times;
    const std::size_t idx = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), t) - d.begin());
    const double left_t = idx == 0 ? 1.0 : d[idx - 1];
    const double left_x = idx == 0 ? profile.base_value : profile.values[idx - 1];
    double x_mod = left_x;
    if (t != left_t) {
        const double right_t = idx < d.size() ? d[idx] : 2.0;
        const double right_x = idx < d.size() ? profile.values[idx] : left_x;
        x_mod = left_x + (t - left_t) * (right_x - left_x) / (right_t - left_t);
    }
    return (x_mod - 2.0 * profile.n * t) / std::cbrt(profile.n);
}

} // namespace lpp
