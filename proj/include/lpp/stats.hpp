#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpp/errors.hpp"

namespace lpp {

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points; // (log x, log y)
};

// Ordinary least squares of y on x; stderr is the usual slope standard
// error sqrt(SSE / (m - 2) / Sxx).
inline ExponentFit fit_line(std::vector<std::pair<double, double>> xy) {
    require(xy.size() >= 3, ErrorKind::invalid_argument, "fit needs at least 3 points");
    const double m = static_cast<double>(xy.size());
    double mx = 0, my = 0;
    for (auto [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    require(sxx > 0, ErrorKind::invalid_argument, "fit needs at least two distinct abscissae");
    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double sse = std::max(0.0, syy - fit.slope * sxy);
    fit.stderr_slope = std::sqrt(sse / (m - 2.0) / sxx);
    fit.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
    fit.points = std::move(xy);
    return fit;
}

// Least squares on (log x, log y); the slope estimates the exponent.
inline ExponentFit fit_power_law(std::span<const std::pair<double, double>> points) {
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (auto [x, y] : points) {
        if (!(x > 0) || !(y > 0)) fail(ErrorKind::invalid_argument, "fit_power_law: inputs must be positive");
        logs.emplace_back(std::log(x), std::log(y));
    }
    return fit_line(std::move(logs));
}

// Empirical survival function P̂(statistic >= threshold).
struct TailEstimate {
    std::vector<double> thresholds;
    std::vector<double> survival_probs;
    std::size_t sample_size = 0;
    double fitted_outer_exponent = std::nan("");
};

inline TailEstimate tail_estimate(std::span<const double> sample, std::vector<double> thresholds) {
    require(!sample.empty(), ErrorKind::invalid_argument, "tail_estimate: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::sort(thresholds.begin(), thresholds.end());
    TailEstimate te;
    te.sample_size = sorted.size();
    for (double s : thresholds) {
        const auto at_least = static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), s));
        te.thresholds.push_back(s);
        te.survival_probs.push_back(at_least / static_cast<double>(sorted.size()));
    }
    return te;
}

// Keeps only thresholds whose survival estimate lies in (lo, hi).
inline TailEstimate restrict_tail(const TailEstimate& te, double lo = 0.001, double hi = 0.5) {
    TailEstimate out;
    out.sample_size = te.sample_size;
    for (std::size_t i = 0; i < te.thresholds.size(); ++i) {
        if (te.survival_probs[i] > lo && te.survival_probs[i] < hi) {
            out.thresholds.push_back(te.thresholds[i]);
            out.survival_probs.push_back(te.survival_probs[i]);
        }
    }
    return out;
}

struct TailFit {
    double exponent = 0.0;
    ExponentFit fit;
    std::vector<double> excluded; // thresholds dropped because P̂ was 0 or 1
};

// Slope of log(-log P̂) against log s, the β of P ≈ exp(-c s^β).
inline TailFit fit_tail(const TailEstimate& te) {
    TailFit out;
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 0; i < te.thresholds.size(); ++i) {
        const double s = te.thresholds[i];
        const double p = te.survival_probs[i];
        if (!(p > 0.0 && p < 1.0) || !(s > 0)) {
            out.excluded.push_back(s);
            continue;
        }
        xy.emplace_back(std::log(s), std::log(-std::log(p)));
    }
    if (xy.size() < 3) fail(ErrorKind::invalid_argument, "fit_tail_exponent: fewer than 3 usable thresholds");
    out.fit = fit_line(std::move(xy));
    out.exponent = out.fit.slope;
    return out;
}

inline double fit_tail_exponent(const TailEstimate& te) { return fit_tail(te).exponent; }

// Two-sample Kolmogorov–Smirnov statistic sup |F1 - F2|.
inline double ks_distance(std::span<const double> first, std::span<const double> second) {
    require(!first.empty() && !second.empty(), ErrorKind::invalid_argument, "ks_distance: empty sample");
    std::vector<double> x(first.begin(), first.end()), y(second.begin(), second.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        best = std::max(best, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return best == 0.0 && (i < x.size() || j < y.size()) ? 1.0 : best;
}

inline double mean(std::span<const double> xs) {
    require(!xs.empty(), ErrorKind::invalid_argument, "mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
    require(xs.size() >= 2, ErrorKind::invalid_argument, "variance needs two values");
    const double mu = mean(xs);
    double ss = 0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return ss / static_cast<double>(xs.size() - 1);
}

inline double standard_error(std::span<const double> xs) {
    return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

// Linear-interpolated quantile (type 7).
inline double quantile(std::span<const double> xs, double q) {
    require(!xs.empty(), ErrorKind::invalid_argument, "quantile of empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::span<const double> xs) { return quantile(xs, 0.5); }

} // namespace lpp
