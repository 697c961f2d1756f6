#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lidargait/features.hpp"
#include "lidargait/skeleton.hpp"

namespace lidargait {

enum class TrimRule { Iqr, Percentile };

/// How the concatenation window is chosen: one voted value for all sequences (Global), each sequence's own
/// estimate (PerSequence), or a fixed length (Fixed).
enum class CycleMode { Global, PerSequence, Fixed };

struct CycleOptions {
    /// Minimum peak prominence in meters.
    double min_prominence = 0.05;
    int fallback_cycle = 20;
    TrimRule trim = TrimRule::Iqr;
    double iqr_factor = 1.5;
    /// Kept range for TrimRule::Percentile, in percent.
    double lower_percentile = 10.0;
    double upper_percentile = 90.0;
    int stride = 1;
    CycleMode mode = CycleMode::Global;
    int fixed_window = 1;

    void validate() const;
};

struct CycleEstimate {
    int cycle_frames = 0;
    std::vector<int> candidate_cycles;
    std::vector<int> trimmed_cycles;
    std::vector<Index> peaks;
    /// True when cycle_frames is the configured fallback rather than a voted value.
    bool fallback = false;
    std::vector<std::string> warnings;
};

/// Per-frame Euclidean distance between the right and left ankles.
Eigen::VectorXd ankle_distance(const WorldSkeletonSequence& seq);

/// Topographic prominence of the sample at `peak`: its height above the higher of the two lowest points
/// reached before meeting a higher sample (or the series end) on either side.
double peak_prominence(const Eigen::VectorXd& series, Index peak);

/// Local maxima (plateaus report their left-middle sample) with prominence >= min_prominence.
std::vector<Index> find_peaks(const Eigen::VectorXd& series, double min_prominence);

/// Gait-cycle length from an ankle-distance series.
///
/// One cycle spans two consecutive peak gaps, so candidates are the distances between every second peak.
/// Candidates outside the trim fences are dropped and the most frequent survivor wins (ties: smaller).
/// Fewer than 3 peaks, or nothing left after trimming, yields the fallback cycle with a warning.
CycleEstimate estimate_cycle(const Eigen::VectorXd& distance, const CycleOptions& opts);

/// Keeps candidates inside the configured fences.
std::vector<int> trim_cycles(const std::vector<int>& candidates, const CycleOptions& opts);

/// Mode of the non-fallback estimates (ties: smaller); the mode of the fallbacks if all fell back.
int vote_global_cycle(const std::vector<CycleEstimate>& estimates);

struct WindowSet {
    FeatureMatrix values; ///< one flattened window per row, C * dim wide
    std::vector<Index> start_frames;
    std::vector<std::string> warnings;
};

/// Sliding windows of `window` consecutive feature rows flattened frame-major, advancing by `stride`.
/// A list shorter than the window yields no windows and a warning.
WindowSet concatenate_features(const FeatureMatrix& frame_features, int window, int stride = 1);

TrimRule trim_rule_from_string(const std::string& name);
std::string to_string(TrimRule rule);
CycleMode cycle_mode_from_string(const std::string& name);
std::string to_string(CycleMode mode);

} // namespace lidargait
