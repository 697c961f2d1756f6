#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace lidargait::stats {

/// Median of a non-empty sample; even sizes average the two middle values.
template <typename Scalar>
Scalar median(std::vector<Scalar> values) {
    if (values.empty())
        throw std::invalid_argument("median of empty sample");
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1)
        return *mid;
    const Scalar upper = *mid;
    const Scalar lower = *std::max_element(values.begin(), mid);
    return (lower + upper) / Scalar(2);
}

/// Quantile with linear interpolation between order statistics (type 7), q in [0, 1].
template <typename Scalar>
double quantile(std::vector<Scalar> values, double q) {
    if (values.empty())
        throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return static_cast<double>(values[lo]) + frac * (static_cast<double>(values[hi]) - static_cast<double>(values[lo]));
}

/// Most frequent value; ties go to the smaller value.
template <typename T>
T mode(const std::vector<T>& values) {
    if (values.empty())
        throw std::invalid_argument("mode of empty sample");
    std::map<T, std::size_t> counts;
    for (const auto& v : values)
        ++counts[v];
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second)
            best = it;
    }
    return best->first;
}

} // namespace lidargait::stats
