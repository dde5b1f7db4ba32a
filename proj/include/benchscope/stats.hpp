#ifndef BENCHSCOPE_STATS_HPP
#define BENCHSCOPE_STATS_HPP

#include "benchscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace benchscope::stats {

/// Geometric mean of strictly positive values.
///
/// The product is carried as a mantissa in [0.5, 1) plus a binary exponent, so
/// long inputs neither overflow nor underflow. The integral part of exponent/n is
/// applied with ldexp, which keeps small exact cases exact (gm{2, 8} == 4.0).
inline double geomean_positive(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(Errc::EmptyGroup, "geometric mean of an empty set");
    }
    double mantissa = 1.0;
    std::int64_t exponent = 0;
    for (const double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(Errc::NonPositiveScore, "geometric mean requires finite positive values");
        }
        int e = 0;
        mantissa *= std::frexp(v, &e);
        exponent += e;
        int renorm = 0;
        mantissa = std::frexp(mantissa, &renorm);
        exponent += renorm;
    }
    const auto n = static_cast<std::int64_t>(values.size());
    std::int64_t whole = exponent / n;
    std::int64_t rest = exponent % n;
    if (rest < 0) {
        rest += n;
        whole -= 1;
    }
    const double inv = 1.0 / static_cast<double>(n);
    double root = 0.0;
    if (rest <= 900) {
        root = std::pow(std::ldexp(mantissa, static_cast<int>(rest)), inv);
    } else {
        root = std::pow(mantissa, inv) * std::exp2(static_cast<double>(rest) * inv);
    }
    return std::ldexp(root, static_cast<int>(whole));
}

struct Geomean {
    std::optional<double> value; ///< absent when no value is strictly positive
    std::size_t used = 0;
    std::size_t excluded_zeros = 0;
};

/// Geometric mean over the strictly positive entries; zeros are counted, not used.
inline Geomean geomean_excluding_zeros(std::span<const double> values)
{
    Geomean out;
    std::vector<double> positive;
    positive.reserve(values.size());
    for (const double v : values) {
        if (v > 0.0) {
            positive.push_back(v);
        } else {
            ++out.excluded_zeros;
        }
    }
    out.used = positive.size();
    if (!positive.empty()) {
        out.value = geomean_positive(positive);
    }
    return out;
}

inline double mean(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(Errc::EmptyGroup, "mean of an empty set");
    }
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

/// Quantile with linear interpolation between closest ranks (h = (n-1)p).
/// `sorted` must be ascending.
inline double quantile_sorted(std::span<const double> sorted, double p)
{
    if (sorted.empty()) {
        throw Error(Errc::EmptyGroup, "quantile of an empty set");
    }
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Summary {
    std::size_t count = 0;
    Geomean geomean;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Box statistics (whiskers at min/max) plus the zero-excluding geometric mean.
inline Summary summarize(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(Errc::EmptyGroup, "summary of an empty set");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Summary s;
    s.count = sorted.size();
    s.geomean = geomean_excluding_zeros(sorted);
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile_sorted(sorted, 0.25);
    s.median = quantile_sorted(sorted, 0.5);
    s.q3 = quantile_sorted(sorted, 0.75);
    return s;
}

} // namespace benchscope::stats

#endif
