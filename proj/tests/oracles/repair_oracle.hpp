#pragma once

// Naive reference for the median correction pass. Deliberately written without the library's data
// structures: every frame rescans the already-corrected output backwards.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

struct RepairParams {
    int window_card = 3;
    int lookback = 30;
    bool relative = true;
    double jump_factor = 1.0;
    int max_jump_run = 0;
};

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double threshold_of(const std::vector<double>& x, bool relative) {
    std::vector<double> d;
    for (std::size_t t = 1; t < x.size(); ++t) {
        if (x[t - 1] == 0.0 || x[t] == 0.0)
            continue;
        const double diff = std::fabs(x[t] - x[t - 1]);
        if (diff == 0.0)
            continue;
        d.push_back(relative ? diff / std::fabs(x[t - 1]) : diff);
    }
    if (d.empty())
        return std::numeric_limits<double>::infinity();
    return median_of(d);
}

inline std::vector<double> repair(const std::vector<double>& x, const RepairParams& p) {
    const long n = static_cast<long>(x.size());
    std::vector<double> y = x;
    std::vector<bool> settled(x.size(), false);
    const double thr = threshold_of(x, p.relative) * p.jump_factor;

    int run = 0;
    for (long t = 0; t < n; ++t) {
        // corrected nonzero values among the previous `lookback` frames, newest first
        std::vector<double> w;
        for (long s = t - 1; s >= 0 && s >= t - p.lookback && static_cast<int>(w.size()) < p.window_card; --s)
            if (settled[s] && y[s] != 0.0)
                w.push_back(y[s]);

        bool replace = false;
        if (x[t] == 0.0) {
            run = 0;
            replace = true;
        } else if (t > 0 && settled[t - 1] && y[t - 1] != 0.0 &&
                   std::fabs(x[t] - y[t - 1]) / std::fabs(y[t - 1]) > thr &&
                   (p.max_jump_run == 0 || run < p.max_jump_run)) {
            ++run;
            replace = true;
        } else {
            run = 0;
        }

        if (!replace) {
            settled[t] = true;
            continue;
        }
        if (w.empty())
            continue;
        y[t] = median_of(w);
        settled[t] = true;
    }

    bool any = false;
    for (long t = 0; t < n; ++t)
        any = any || settled[t];
    if (!any)
        return y;
    // unsettled samples: nearest settled value to the right, else to the left
    for (long t = 0; t < n; ++t) {
        if (settled[t])
            continue;
        long r = t + 1;
        while (r < n && !settled[r])
            ++r;
        if (r < n && y[r] != 0.0) {
            y[t] = y[r];
            continue;
        }
        long l = t - 1;
        while (l >= 0 && !settled[l])
            --l;
        if (l >= 0)
            y[t] = y[l];
    }
    return y;
}

} // namespace oracle
