#include "lidargait/repair.hpp"

namespace lidargait {

void RepairConfig::validate() const {
    if (window_card < 1)
        throw ValidationError("repair.window_card must be positive");
    if (lookback < window_card)
        throw ValidationError("repair.lookback must be >= repair.window_card");
    if (smoothing_span < 3 || smoothing_span % 2 == 0)
        throw ValidationError("repair.smoothing_span must be odd and >= 3");
    if (robust_iterations < 0)
        throw ValidationError("repair.robust_iterations must be non-negative");
    if (!(jump_factor > 0.0))
        throw ValidationError("repair.jump_factor must be positive");
    if (max_jump_run < 0)
        throw ValidationError("repair.max_jump_run must be non-negative");
}

void RepairReport::add(const TrackRepairReport& track) {
    missing_corrections += track.missing_corrections;
    jump_corrections += track.jump_corrections;
    backfilled += track.backfilled;
    uncorrectable += track.uncorrectable;
    for (const auto& w : track.warnings)
        warnings.push_back(std::string(joint_name(track.joint)) + "_" + axis_name(track.axis) + ": " + w);
    tracks.push_back(track);
}

double jump_threshold(const JointTrack& track, ThresholdMode mode, std::vector<std::string>* warnings) {
    if (track.size() < 2 && warnings)
        warnings->push_back("track shorter than 2 samples; jump rule disabled");
    return jump_threshold(track.values, mode);
}

std::pair<JointTrack, TrackRepairReport> repair_track(const JointTrack& track, const RepairConfig& cfg) {
    cfg.validate();
    TrackRepairReport report;
    report.joint = track.joint;
    report.axis = track.axis;
    report.length = track.size();
    if (track.size() < 2)
        report.warnings.push_back("track shorter than 2 samples; jump rule disabled");

    auto corrected = correct_values(track.values, cfg);
    report.missing_corrections = corrected.missing_corrections;
    report.jump_corrections = corrected.jump_corrections;
    report.backfilled = corrected.backfilled;
    report.uncorrectable = corrected.uncorrectable;
    report.threshold = corrected.threshold;
    if (corrected.uncorrectable > 0)
        report.warnings.push_back("entire track missing; left unchanged");

    JointTrack out = track;
    out.values = std::move(corrected.values);
    return {std::move(out), std::move(report)};
}

JointTrack smooth_track(const JointTrack& track, const RepairConfig& cfg, std::vector<std::string>* warnings) {
    if ((track.values.array() == 0.0).any())
        throw ContractViolation("smooth_track: track still contains missing samples");
    Index span = cfg.smoothing_span;
    const Index n = track.size();
    if (span > n) {
        span = n % 2 == 1 ? n : n - 1;
        if (warnings)
            warnings->push_back("smoothing span " + std::to_string(cfg.smoothing_span) + " clamped to " +
                                std::to_string(span) + " for a " + std::to_string(n) + "-sample track");
    }
    JointTrack out = track;
    if (span < 3)
        return out;
    out.values = lowess::robust_lowess(track.values, span, cfg.robust_iterations);
    return out;
}

SequenceRepair repair_sequence_detailed(const WorldSkeletonSequence& seq, const RepairConfig& cfg) {
    cfg.validate();
    SequenceRepair result{seq, seq, {}};
    for (JointId j : kAllJoints) {
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
            auto [corrected, report] = repair_track(seq.track(j, a), cfg);
            result.corrected.set_track(corrected);
            if (report.uncorrectable == 0)
                result.smoothed.set_track(smooth_track(corrected, cfg, &report.warnings));
            else
                result.smoothed.set_track(corrected);
            result.report.add(report);
        }
    }
    return result;
}

std::pair<WorldSkeletonSequence, RepairReport> repair_sequence(const WorldSkeletonSequence& seq,
                                                               const RepairConfig& cfg) {
    auto detailed = repair_sequence_detailed(seq, cfg);
    return {std::move(detailed.smoothed), std::move(detailed.report)};
}

ThresholdMode threshold_mode_from_string(const std::string& name) {
    if (name == "relative")
        return ThresholdMode::Relative;
    if (name == "literal")
        return ThresholdMode::Literal;
    throw ValidationError("unknown threshold mode '" + name + "' (expected relative or literal)");
}

std::string to_string(ThresholdMode mode) {
    return mode == ThresholdMode::Relative ? "relative" : "literal";
}

} // namespace lidargait
