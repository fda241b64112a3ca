#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "adex/error.hpp"

namespace adex {

inline double mean(std::span<const double> xs) {
    if (xs.empty())
        return 0.0;
    double s = 0.0;
    for (double x : xs)
        s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n-1 divisor); 0 for fewer than 2 values.
inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2)
        return 0.0;
    double m = mean(xs);
    double s = 0.0;
    for (double x : xs)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

/// Quantile with linear interpolation between order statistics
/// (the inclusive / R-7 method). p in [0, 1].
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty())
        throw DegenerateError("quantile of empty sample");
    if (sorted.size() == 1)
        return sorted[0];
    double idx = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(idx));
    auto hi = static_cast<std::size_t>(std::ceil(idx));
    if (lo == hi)
        return sorted[lo];
    double frac = idx - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, p);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

/// Pearson correlation; 0 when either side is constant.
inline double pearson(std::span<const double> a, std::span<const double> b) {
    std::size_t n = std::min(a.size(), b.size());
    if (n < 2)
        return 0.0;
    double ma = mean(a.subspan(0, n));
    double mb = mean(b.subspan(0, n));
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma;
        double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        return 0.0;
    return sab / std::sqrt(saa * sbb);
}

} // namespace adex
