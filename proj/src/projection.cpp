#include "lidargait/projection.hpp"

namespace lidargait {

ProjectedFrame project_frame(const RawSkeletonFrame& frame, const CameraParams& cam) {
    ProjectedFrame out;
    for (int j = 0; j < kJointCount; ++j) {
        const auto& obs = frame.joints[static_cast<std::size_t>(j)];
        if (!obs.valid)
            continue;
        out.points(j, 0) = project_joint(obs.x_px, cam.n_pixels_x, cam.aov_x_deg, obs.range_m, cam.origin);
        out.points(j, 1) = project_joint(obs.y_px, cam.n_pixels_y, cam.aov_y_deg, obs.range_m, cam.origin);
        out.points(j, 2) = obs.range_m;
        out.valid.set(static_cast<std::size_t>(j));
    }
    return out;
}

TrackMatrix tracks_from_frames(std::span<const RawSkeletonFrame> frames, std::span<const ProjectedFrame> world) {
    if (frames.size() != world.size())
        throw ValidationError("tracks_from_frames: " + std::to_string(frames.size()) + " frames but " +
                              std::to_string(world.size()) + " projected frames");
    TrackMatrix tracks = TrackMatrix::Zero(static_cast<Index>(frames.size()), kTrackCount);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (int j = 0; j < kJointCount; ++j) {
            const bool present = frames[f].joints[static_cast<std::size_t>(j)].valid &&
                                 world[f].valid.test(static_cast<std::size_t>(j));
            if (!present)
                continue;
            for (int a = 0; a < kAxisCount; ++a)
                tracks(static_cast<Index>(f), j * kAxisCount + a) = world[f].points(j, a);
        }
    }
    return tracks;
}

WorldSkeletonSequence to_world_sequence(const RawSequence& raw, const CameraParams& cam) {
    cam.validate();
    std::vector<ProjectedFrame> world;
    world.reserve(raw.frames.size());
    for (const auto& frame : raw.frames)
        world.push_back(project_frame(frame, cam));

    WorldSkeletonSequence seq;
    seq.sequence_id = raw.sequence_id;
    seq.subject_label = raw.subject;
    seq.walk_type = raw.walk;
    seq.tracks = tracks_from_frames(raw.frames, world);
    seq.frame_indices.reserve(raw.frames.size());
    for (const auto& frame : raw.frames)
        seq.frame_indices.push_back(frame.frame_index);
    return seq;
}

RawSkeletonFrame to_raw_frame(std::int64_t frame_index, const SkeletonPoints<double>& points,
                              const std::bitset<kJointCount>& valid, const CameraParams& cam) {
    RawSkeletonFrame frame;
    frame.frame_index = frame_index;
    for (int j = 0; j < kJointCount; ++j) {
        auto& obs = frame.joints[static_cast<std::size_t>(j)];
        const double range = points(j, 2);
        if (!valid.test(static_cast<std::size_t>(j)) || !(range > 0.0))
            continue;
        obs.x_px = unproject_joint(points(j, 0), cam.n_pixels_x, cam.aov_x_deg, range, cam.origin);
        obs.y_px = unproject_joint(points(j, 1), cam.n_pixels_y, cam.aov_y_deg, range, cam.origin);
        obs.range_m = range;
        obs.valid = obs.x_px >= 0.0 && obs.y_px >= 0.0 && obs.x_px <= cam.n_pixels_x && obs.y_px <= cam.n_pixels_y;
        if (!obs.valid)
            obs = JointObservation{};
    }
    return frame;
}

} // namespace lidargait
