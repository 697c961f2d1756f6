#include "lidargait/skeleton.hpp"

#include <cmath>
#include <numeric>

#include "lidargait/errors.hpp"

namespace lidargait {

std::string_view joint_name(JointId j) {
    return kJointNames[static_cast<std::size_t>(index_of(j))];
}

std::optional<JointId> joint_from_name(std::string_view name) {
    for (int i = 0; i < kJointCount; ++i) {
        if (kJointNames[static_cast<std::size_t>(i)] == name)
            return static_cast<JointId>(i);
    }
    return std::nullopt;
}

char axis_name(Axis a) {
    return "xyz"[index_of(a)];
}

void CameraParams::validate() const {
    if (n_pixels_x <= 0 || n_pixels_y <= 0)
        throw DomainError("camera pixel counts must be positive");
    auto angle_ok = [](double deg) { return std::isfinite(deg) && deg > 0.0 && deg < 180.0; };
    if (!angle_ok(aov_x_deg) || !angle_ok(aov_y_deg))
        throw DomainError("camera angle of view must lie strictly between 0 and 180 degrees");
}

JointTrack WorldSkeletonSequence::track(JointId j, Axis a) const {
    JointTrack t;
    t.values = tracks.col(track_column(j, a));
    t.axis = a;
    t.joint = j;
    return t;
}

void WorldSkeletonSequence::set_track(const JointTrack& track) {
    if (track.size() != tracks.rows())
        throw ValidationError("track length " + std::to_string(track.size()) + " does not match sequence length " +
                              std::to_string(tracks.rows()));
    tracks.col(track_column(track.joint, track.axis)) = track.values;
}

SkeletonPoints<double> WorldSkeletonSequence::frame_points(Index frame) const {
    // row layout is joint-major, so the row is a row-major 14x3 block
    Eigen::Matrix<double, 1, kTrackCount> row = tracks.row(frame);
    return Eigen::Map<const Eigen::Matrix<double, kJointCount, 3, Eigen::RowMajor>>(row.data());
}

void WorldSkeletonSequence::set_frame_points(Index frame, const SkeletonPoints<double>& points) {
    Eigen::Matrix<double, kJointCount, 3, Eigen::RowMajor> rm = points;
    tracks.row(frame) = Eigen::Map<const Eigen::Matrix<double, 1, kTrackCount>>(rm.data());
}

void WorldSkeletonSequence::validate() const {
    if (static_cast<Index>(frame_indices.size()) != tracks.rows())
        throw ValidationError("sequence '" + sequence_id + "' has " + std::to_string(frame_indices.size()) +
                              " frame indices for " + std::to_string(tracks.rows()) + " track rows");
}

WorldSkeletonSequence make_sequence(std::string sequence_id, std::string subject, std::string walk, Index frames) {
    WorldSkeletonSequence seq;
    seq.sequence_id = std::move(sequence_id);
    seq.subject_label = std::move(subject);
    seq.walk_type = std::move(walk);
    seq.tracks = TrackMatrix::Zero(frames, kTrackCount);
    seq.frame_indices.resize(static_cast<std::size_t>(frames));
    std::iota(seq.frame_indices.begin(), seq.frame_indices.end(), std::int64_t{0});
    return seq;
}

} // namespace lidargait
