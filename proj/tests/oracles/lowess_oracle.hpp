#pragma once

// Brute-force robust local linear regression: for every point, gather the `span` nearest samples by
// sorting distances, then solve the weighted 2x2 normal equations directly.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

inline double tricube(double u) {
    const double a = 1.0 - u * u * u;
    return a * a * a;
}

inline double bisquare(double u) {
    const double a = 1.0 - u * u;
    return a * a;
}

inline double local_fit(const std::vector<double>& y, const std::vector<double>& rob, long i, long span) {
    const long n = static_cast<long>(y.size());
    std::vector<long> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0L);
    std::stable_sort(idx.begin(), idx.end(), [i](long a, long b) { return std::labs(a - i) < std::labs(b - i); });
    idx.resize(static_cast<std::size_t>(span));
    long far = 0;
    for (long j : idx)
        far = std::max(far, std::labs(j - i));
    const double h = static_cast<double>(far + 1);

    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (long j : idx) {
        const double x = static_cast<double>(j - i);
        const double w = tricube(std::fabs(x) / h) * rob[static_cast<std::size_t>(j)];
        s0 += w;
        s1 += w * x;
        s2 += w * x * x;
        t0 += w * y[static_cast<std::size_t>(j)];
        t1 += w * x * y[static_cast<std::size_t>(j)];
    }
    if (!(s0 > 0))
        return y[static_cast<std::size_t>(i)];
    const double det = s0 * s2 - s1 * s1;
    if (det <= 1e-10 * s0 * s0 * h * h)
        return t0 / s0;
    // intercept of the weighted line at x = 0
    return (s2 * t0 - s1 * t1) / det;
}

inline std::vector<double> robust_lowess(const std::vector<double>& y, long span, int iterations) {
    const long n = static_cast<long>(y.size());
    std::vector<double> fit = y;
    if (n < 2 || span < 2)
        return fit;
    span = std::min(span, n);
    std::vector<double> rob(y.size(), 1.0);
    double mean_abs = 0;
    for (double v : y)
        mean_abs += std::fabs(v);
    const double floor = 1e-12 * (1.0 + mean_abs / static_cast<double>(n));
    for (int pass = 0; pass <= iterations; ++pass) {
        for (long i = 0; i < n; ++i)
            fit[static_cast<std::size_t>(i)] = local_fit(y, rob, i, span);
        if (pass == iterations)
            break;
        std::vector<double> r(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            r[i] = std::fabs(y[i] - fit[i]);
        std::vector<double> sorted = r;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size();
        double scale = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        if (scale <= floor)
            scale = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(m);
        if (scale <= floor)
            break;
        for (std::size_t i = 0; i < m; ++i)
            rob[i] = r[i] < 6 * scale ? bisquare(r[i] / (6 * scale)) : 0.0;
    }
    return fit;
}

} // namespace oracle
