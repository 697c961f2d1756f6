#pragma once

#include <bitset>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "lidargait/errors.hpp"
#include "lidargait/skeleton.hpp"

namespace lidargait {

/// Meters per (pixel * meter of range) along one image axis: (2 / N) * tan(aov / 2).
template <typename Scalar>
Scalar pixel_scale(int n_pixels, Scalar aov_deg) {
    if (n_pixels <= 0)
        throw DomainError("n_pixels must be positive");
    if (!(aov_deg > Scalar(0) && aov_deg < Scalar(180)))
        throw DomainError("angle of view must lie strictly between 0 and 180 degrees");
    using std::tan;
    const Scalar half_angle = aov_deg * std::numbers::pi_v<Scalar> / Scalar(360);
    return Scalar(2) / Scalar(n_pixels) * tan(half_angle);
}

/// Real-world coordinate of a joint along one image axis.
///
/// With PixelOrigin::Center the pixel coordinate is first shifted by n_pixels / 2 so the optical axis maps
/// to 0; PixelOrigin::Corner applies the scale to the raw pixel coordinate.
template <typename Scalar>
Scalar project_joint(Scalar pixel, int n_pixels, Scalar aov_deg, Scalar range_m,
                     PixelOrigin origin = PixelOrigin::Center) {
    if (!(range_m > Scalar(0)))
        throw DomainError("range must be positive");
    const Scalar scale = pixel_scale(n_pixels, aov_deg);
    const Scalar offset = origin == PixelOrigin::Center ? pixel - Scalar(n_pixels) / Scalar(2) : pixel;
    return scale * offset * range_m;
}

/// Inverse of project_joint for a known range.
template <typename Scalar>
Scalar unproject_joint(Scalar world, int n_pixels, Scalar aov_deg, Scalar range_m,
                       PixelOrigin origin = PixelOrigin::Center) {
    if (!(range_m > Scalar(0)))
        throw DomainError("range must be positive");
    const Scalar offset = world / (pixel_scale(n_pixels, aov_deg) * range_m);
    return origin == PixelOrigin::Center ? offset + Scalar(n_pixels) / Scalar(2) : offset;
}

/// World points of one frame. Rows of missing joints are zero and their `valid` bit is clear.
struct ProjectedFrame {
    SkeletonPoints<double> points = SkeletonPoints<double>::Zero();
    std::bitset<kJointCount> valid;
};

ProjectedFrame project_frame(const RawSkeletonFrame& frame, const CameraParams& cam);

/// Stacks per-frame world points into 42 tracks, writing the 0.0 sentinel where a joint is missing.
TrackMatrix tracks_from_frames(std::span<const RawSkeletonFrame> frames, std::span<const ProjectedFrame> world);

/// Ingest + projection in one step.
WorldSkeletonSequence to_world_sequence(const RawSequence& raw, const CameraParams& cam);

/// Inverse direction used by the synthetic generator: a world frame back to pixels and range.
/// Joints with zero depth, or that land outside the image, are emitted as invalid.
RawSkeletonFrame to_raw_frame(std::int64_t frame_index, const SkeletonPoints<double>& points,
                              const std::bitset<kJointCount>& valid, const CameraParams& cam);

} // namespace lidargait
