#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lidargait/errors.hpp"
#include "lidargait/lowess.hpp"
#include "lidargait/skeleton.hpp"
#include "lidargait/stats.hpp"

namespace lidargait {

/// How the jump threshold is formed from the first differences of a track.
///  - Relative: median of |dL| / |L(t-1)|, dimensionless like the left-hand side of the jump test.
///  - Literal:  median of raw |dL| (meters per frame), compared as written against the relative change.
enum class ThresholdMode { Relative, Literal };

struct RepairConfig {
    /// Number of previous nonzero samples whose median replaces a bad sample.
    int window_card = 3;
    /// Frames searched backwards for those samples; must be >= window_card.
    int lookback = 30;
    /// Samples per local fit of the smoother (odd, >= 3).
    int smoothing_span = 15;
    int robust_iterations = 3;
    ThresholdMode threshold_mode = ThresholdMode::Relative;
    /// Multiplier on the median-derivative threshold. 1 gives the bare median rule.
    double jump_factor = 10.0;
    /// After this many consecutive observed samples flagged as jumps, the next observation is accepted as a
    /// level change. 0 disables the release (a flagged run continues for as long as the test fires).
    int max_jump_run = 1;

    /// Throws ValidationError on out-of-range fields.
    void validate() const;
};

struct TrackRepairReport {
    JointId joint = JointId::Head;
    Axis axis = Axis::X;
    Index length = 0;
    Index missing_corrections = 0; ///< includes deferred fills
    Index jump_corrections = 0;
    Index backfilled = 0;
    Index uncorrectable = 0;
    double threshold = std::numeric_limits<double>::infinity(); ///< after jump_factor
    std::vector<std::string> warnings;
};

struct RepairReport {
    std::vector<TrackRepairReport> tracks;
    Index missing_corrections = 0;
    Index jump_corrections = 0;
    Index backfilled = 0;
    Index uncorrectable = 0;
    std::vector<std::string> warnings;

    void add(const TrackRepairReport& track);
};

/// Median of the nonzero first differences between consecutive nonzero samples; +inf when there are none.
/// In Relative mode every difference is divided by the magnitude of the earlier sample.
template <typename Derived>
typename Derived::Scalar jump_threshold(const Eigen::MatrixBase<Derived>& values, ThresholdMode mode) {
    using Scalar = typename Derived::Scalar;
    std::vector<Scalar> diffs;
    for (Eigen::Index t = 1; t < values.size(); ++t) {
        const Scalar prev = values(t - 1);
        const Scalar curr = values(t);
        if (prev == Scalar(0) || curr == Scalar(0) || curr == prev)
            continue;
        using std::abs;
        diffs.push_back(mode == ThresholdMode::Relative ? abs(curr - prev) / abs(prev) : abs(curr - prev));
    }
    if (diffs.empty())
        return std::numeric_limits<Scalar>::infinity();
    return stats::median(std::move(diffs));
}

/// Sudden-jump test: relative change from the (already corrected) previous sample exceeds the threshold.
template <typename Scalar>
bool is_jump(Scalar prev, Scalar curr, Scalar threshold) {
    if (prev == Scalar(0))
        throw ContractViolation("is_jump: previous sample must be nonzero (corrected before use)");
    using std::abs;
    return abs(curr - prev) / abs(prev) > threshold;
}

template <typename Scalar>
struct CorrectionResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
    Index missing_corrections = 0;
    Index jump_corrections = 0;
    Index backfilled = 0;
    Index uncorrectable = 0;
    Scalar threshold = std::numeric_limits<Scalar>::infinity();
};

/// Short-memory median correction, one causal left-to-right pass.
///
/// A sample is replaced when it is missing (0) or a sudden jump relative to the corrected previous sample.
/// The replacement is the median of the `window_card` most recent nonzero corrected samples found in the
/// previous `lookback` frames, or of as many as exist. Corrected samples join that memory, so only a leading gap
/// finds it empty; such samples are filled after the pass from the next corrected sample. An all-missing track
/// is returned unchanged.
template <typename Derived>
CorrectionResult<typename Derived::Scalar> correct_values(const Eigen::MatrixBase<Derived>& input,
                                                          const RepairConfig& cfg) {
    using Scalar = typename Derived::Scalar;
    CorrectionResult<Scalar> res;
    res.values = input;
    auto& out = res.values;
    const Eigen::Index n = out.size();

    res.threshold = jump_threshold(input, cfg.threshold_mode) * Scalar(cfg.jump_factor);
    if (std::isnan(res.threshold))
        res.threshold = std::numeric_limits<Scalar>::infinity();

    // most recent nonzero corrected samples, oldest first, as (frame, value)
    std::deque<std::pair<Eigen::Index, Scalar>> recent;
    auto window_median = [&](Eigen::Index t) {
        while (!recent.empty() && recent.front().first < t - cfg.lookback)
            recent.pop_front();
        std::vector<Scalar> w;
        for (const auto& item : recent)
            w.push_back(item.second);
        return stats::median(std::move(w));
    };
    auto remember = [&](Eigen::Index t, Scalar v) {
        recent.emplace_back(t, v);
        if (static_cast<int>(recent.size()) > cfg.window_card)
            recent.pop_front();
    };

    // samples with nothing in their horizon, filled once the pass is done
    std::vector<Eigen::Index> deferred;
    int jump_run = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const Scalar raw = out(t);
        if (raw == Scalar(0)) {
            jump_run = 0;
            while (!recent.empty() && recent.front().first < t - cfg.lookback)
                recent.pop_front();
            if (recent.empty()) {
                deferred.push_back(t);
                continue;
            }
            out(t) = window_median(t);
            ++res.missing_corrections;
        } else if (t > 0 && out(t - 1) != Scalar(0) && is_jump(out(t - 1), raw, res.threshold) &&
                   (cfg.max_jump_run <= 0 || jump_run < cfg.max_jump_run)) {
            out(t) = window_median(t);
            ++res.jump_corrections;
            ++jump_run;
        } else {
            jump_run = 0;
        }
        if (out(t) != Scalar(0))
            remember(t, out(t));
    }

    if (static_cast<Eigen::Index>(deferred.size()) == n) {
        res.uncorrectable = n;
        return res;
    }
    // deferred samples take the next corrected value, or the previous one at the end of the track
    for (auto it = deferred.rbegin(); it != deferred.rend(); ++it) {
        const Eigen::Index t = *it;
        out(t) = t + 1 < n && out(t + 1) != Scalar(0) ? out(t + 1) : Scalar(0);
    }
    for (const Eigen::Index t : deferred) {
        if (out(t) == Scalar(0) && t > 0)
            out(t) = out(t - 1);
        ++res.backfilled;
        ++res.missing_corrections;
    }
    return res;
}

/// Centered moving median of `window` samples, shrinking at the ends. Treats 0 as an ordinary value.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> moving_median(const Eigen::MatrixBase<Derived>& values,
                                                                          Eigen::Index window) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = values;
    const Eigen::Index n = v.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    const Eigen::Index before = (window - 1) / 2;
    const Eigen::Index after = window - 1 - before;
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, t - before);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, t + after);
        out(t) = stats::median(std::vector<Scalar>(v.data() + lo, v.data() + hi + 1));
    }
    return out;
}

/// Jump threshold of a track (without jump_factor). Records a warning when the track is shorter than 2.
double jump_threshold(const JointTrack& track, ThresholdMode mode, std::vector<std::string>* warnings = nullptr);

std::pair<JointTrack, TrackRepairReport> repair_track(const JointTrack& track, const RepairConfig& cfg);

/// Robust local first-order smoothing. Requires a fully repaired track (ContractViolation otherwise).
/// A span longer than the track is clamped to the largest odd length that fits, with a warning.
JointTrack smooth_track(const JointTrack& track, const RepairConfig& cfg, std::vector<std::string>* warnings = nullptr);

struct SequenceRepair {
    WorldSkeletonSequence corrected; ///< after the median pass, before smoothing
    WorldSkeletonSequence smoothed;
    RepairReport report;
};

/// Median correction then smoothing on each of the 42 tracks independently.
SequenceRepair repair_sequence_detailed(const WorldSkeletonSequence& seq, const RepairConfig& cfg);
std::pair<WorldSkeletonSequence, RepairReport> repair_sequence(const WorldSkeletonSequence& seq,
                                                               const RepairConfig& cfg);

ThresholdMode threshold_mode_from_string(const std::string& name);
std::string to_string(ThresholdMode mode);

} // namespace lidargait
