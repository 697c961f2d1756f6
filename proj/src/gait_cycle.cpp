#include "lidargait/gait_cycle.hpp"

#include <algorithm>

#include "lidargait/errors.hpp"
#include "lidargait/stats.hpp"

namespace lidargait {

void CycleOptions::validate() const {
    if (!(min_prominence >= 0.0))
        throw ValidationError("cycle.min_prominence must be non-negative");
    if (fallback_cycle < 1)
        throw ValidationError("cycle.fallback_cycle must be positive");
    if (!(iqr_factor >= 0.0))
        throw ValidationError("cycle.iqr_factor must be non-negative");
    if (!(lower_percentile >= 0.0 && lower_percentile <= upper_percentile && upper_percentile <= 100.0))
        throw ValidationError("cycle percentiles must satisfy 0 <= lower <= upper <= 100");
    if (stride < 1)
        throw ValidationError("cycle.stride must be positive");
    if (fixed_window < 1)
        throw ValidationError("cycle.window must be positive");
}

Eigen::VectorXd ankle_distance(const WorldSkeletonSequence& seq) {
    const auto r = seq.tracks.middleCols<3>(track_column(JointId::RAnkle, Axis::X));
    const auto l = seq.tracks.middleCols<3>(track_column(JointId::LAnkle, Axis::X));
    return (r - l).rowwise().norm();
}

double peak_prominence(const Eigen::VectorXd& series, Index peak) {
    const double height = series(peak);
    double left_min = height;
    for (Index i = peak - 1; i >= 0 && series(i) <= height; --i)
        left_min = std::min(left_min, series(i));
    double right_min = height;
    for (Index i = peak + 1; i < series.size() && series(i) <= height; ++i)
        right_min = std::min(right_min, series(i));
    return height - std::max(left_min, right_min);
}

std::vector<Index> find_peaks(const Eigen::VectorXd& series, double min_prominence) {
    std::vector<Index> peaks;
    const Index n = series.size();
    Index i = 1;
    while (i < n - 1) {
        if (series(i - 1) < series(i)) {
            Index ahead = i + 1;
            while (ahead < n - 1 && series(ahead) == series(i))
                ++ahead;
            if (series(ahead) < series(i)) {
                const Index peak = (i + ahead - 1) / 2;
                if (peak_prominence(series, peak) >= min_prominence)
                    peaks.push_back(peak);
                i = ahead;
                continue;
            }
        }
        ++i;
    }
    return peaks;
}

std::vector<int> trim_cycles(const std::vector<int>& candidates, const CycleOptions& opts) {
    if (candidates.empty())
        return {};
    double lo = 0.0;
    double hi = 0.0;
    if (opts.trim == TrimRule::Iqr) {
        const double q1 = stats::quantile(candidates, 0.25);
        const double q3 = stats::quantile(candidates, 0.75);
        lo = q1 - opts.iqr_factor * (q3 - q1);
        hi = q3 + opts.iqr_factor * (q3 - q1);
    } else {
        lo = stats::quantile(candidates, opts.lower_percentile / 100.0);
        hi = stats::quantile(candidates, opts.upper_percentile / 100.0);
    }
    std::vector<int> kept;
    std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(kept),
                 [lo, hi](int c) { return c >= lo && c <= hi; });
    return kept;
}

CycleEstimate estimate_cycle(const Eigen::VectorXd& distance, const CycleOptions& opts) {
    opts.validate();
    CycleEstimate est;
    auto fall_back = [&](const std::string& why) {
        est.cycle_frames = opts.fallback_cycle;
        est.fallback = true;
        est.warnings.push_back(why + "; using fallback cycle " + std::to_string(opts.fallback_cycle));
        return est;
    };
    if (distance.size() < 3)
        return fall_back("distance series shorter than 3 frames");

    est.peaks = find_peaks(distance, opts.min_prominence);
    if (est.peaks.size() < 3)
        return fall_back("found " + std::to_string(est.peaks.size()) + " peaks, need at least 3");

    for (std::size_t p = 0; p + 2 < est.peaks.size(); ++p)
        est.candidate_cycles.push_back(static_cast<int>(est.peaks[p + 2] - est.peaks[p]));
    est.trimmed_cycles = trim_cycles(est.candidate_cycles, opts);
    if (est.trimmed_cycles.empty())
        return fall_back("all cycle candidates trimmed");
    est.cycle_frames = stats::mode(est.trimmed_cycles);
    return est;
}

int vote_global_cycle(const std::vector<CycleEstimate>& estimates) {
    if (estimates.empty())
        throw ValidationError("cannot vote a global cycle over zero sequences");
    std::vector<int> voted;
    std::vector<int> fallbacks;
    for (const auto& e : estimates)
        (e.fallback ? fallbacks : voted).push_back(e.cycle_frames);
    return stats::mode(voted.empty() ? fallbacks : voted);
}

WindowSet concatenate_features(const FeatureMatrix& frame_features, int window, int stride) {
    if (window < 1 || stride < 1)
        throw ValidationError("window and stride must be positive");
    WindowSet out;
    const Index frames = frame_features.rows();
    const Index dim = frame_features.cols();
    if (frames < window) {
        out.values.resize(0, window * dim);
        out.warnings.push_back(std::to_string(frames) + " frames is shorter than the window of " +
                               std::to_string(window));
        return out;
    }
    const Index count = (frames - window) / stride + 1;
    out.values.resize(count, window * dim);
    for (Index w = 0; w < count; ++w) {
        const Index start = w * stride;
        out.values.row(w) = Eigen::Map<const Eigen::RowVectorXd>(frame_features.row(start).data(), window * dim);
        out.start_frames.push_back(start);
    }
    return out;
}

TrimRule trim_rule_from_string(const std::string& name) {
    if (name == "iqr")
        return TrimRule::Iqr;
    if (name == "percentile")
        return TrimRule::Percentile;
    throw ValidationError("unknown trim rule '" + name + "' (expected iqr or percentile)");
}

std::string to_string(TrimRule rule) {
    return rule == TrimRule::Iqr ? "iqr" : "percentile";
}

CycleMode cycle_mode_from_string(const std::string& name) {
    if (name == "global")
        return CycleMode::Global;
    if (name == "per-seq")
        return CycleMode::PerSequence;
    if (name == "fixed")
        return CycleMode::Fixed;
    throw ValidationError("unknown cycle mode '" + name + "' (expected global, per-seq or fixed)");
}

std::string to_string(CycleMode mode) {
    switch (mode) {
    case CycleMode::Global:
        return "global";
    case CycleMode::PerSequence:
        return "per-seq";
    case CycleMode::Fixed:
        return "fixed";
    }
    return {};
}

} // namespace lidargait
