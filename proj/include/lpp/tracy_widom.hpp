#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lpp/errors.hpp"
#include "lpp/field.hpp"

namespace lpp {

namespace detail {

// Number of eigenvalues below x of the symmetric tridiagonal matrix with
// diagonal d and off-diagonal squares e2 (Sturm sequence count).
inline std::size_t eigenvalues_below(const std::vector<double>& d, const std::vector<double>& e2, double x) {
    std::size_t count = 0;
    double q = d[0] - x;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (q == 0) q = 1e-300;
        q = d[i] - x - e2[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

inline double standard_normal(std::mt19937_64& engine) {
    // Box-Muller on the fixed 53-bit uniform keeps the stream portable
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform01(engine);
    const double u2 = uniform01(engine);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Gamma(k, 1) for integer k >= 1 by Marsaglia-Tsang.
inline double gamma_integer(std::mt19937_64& engine, double k) {
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = standard_normal(engine);
            v = 1.0 + c * x;
        } while (v <= 0);
        v = v * v * v;
        const double u = uniform01(engine);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

} // namespace detail

// Samples of (λ_max - 2√N) N^{1/6} for the tridiagonal GUE model: diagonal
// N(0, 1), off-diagonal entries χ_{2k}/√2 for k = N-1, ..., 1. The squared
// off-diagonal χ²_{2k}/2 is Gamma(k, 1).
inline std::vector<double> tw_reference_sample(std::size_t m, std::size_t matrix_dim, std::uint64_t seed) {
    require(m >= 1, ErrorKind::invalid_argument, "tw_reference_sample: m must be positive");
    require(matrix_dim >= 2, ErrorKind::invalid_argument, "tw_reference_sample: matrix_dim must be >= 2");
    std::mt19937_64 engine(seed);
    const double dim = static_cast<double>(matrix_dim);
    const double scale = std::pow(dim, 1.0 / 6.0);
    std::vector<double> d(matrix_dim), e2(matrix_dim - 1), out;
    out.reserve(m);
    for (std::size_t s = 0; s < m; ++s) {
        for (auto& x : d) x = detail::standard_normal(engine);
        for (std::size_t i = 0; i + 1 < matrix_dim; ++i) {
            e2[i] = detail::gamma_integer(engine, static_cast<double>(matrix_dim - 1 - i));
        }
        // Gershgorin bounds, then bisect for the largest eigenvalue
        double lo = d[0], hi = d[0];
        for (std::size_t i = 0; i < matrix_dim; ++i) {
            const double r = (i > 0 ? std::sqrt(e2[i - 1]) : 0.0) + (i + 1 < matrix_dim ? std::sqrt(e2[i]) : 0.0);
            lo = std::min(lo, d[i] - r);
            hi = std::max(hi, d[i] + r);
        }
        // bracket needs ~1e-10 relative to the N^{-1/6} scale
        for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (detail::eigenvalues_below(d, e2, mid) == matrix_dim) hi = mid;
            else lo = mid;
        }
        out.push_back((0.5 * (lo + hi) - 2.0 * std::sqrt(dim)) * scale);
    }
    return out;
}

} // namespace lpp
