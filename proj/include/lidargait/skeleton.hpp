#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lidargait {

using Index = Eigen::Index;

/// The 14 canonical skeleton joints. The numeric value is the joint's slot in every per-joint array.
enum class JointId : int {
    Head = 0,
    Neck,
    RShoulder,
    LShoulder,
    RElbow,
    LElbow,
    RWrist,
    LWrist,
    RHip,
    LHip,
    RKnee,
    LKnee,
    RAnkle,
    LAnkle,
};

inline constexpr int kJointCount = 14;
inline constexpr int kAxisCount = 3;
inline constexpr int kTrackCount = kJointCount * kAxisCount;

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "Head", "Neck", "RShoulder", "LShoulder", "RElbow", "LElbow", "RWrist",
    "LWrist", "RHip", "LHip", "RKnee", "LKnee", "RAnkle", "LAnkle",
};

inline constexpr std::array<JointId, kJointCount> kAllJoints = {
    JointId::Head,  JointId::Neck,  JointId::RShoulder, JointId::LShoulder, JointId::RElbow,
    JointId::LElbow, JointId::RWrist, JointId::LWrist,   JointId::RHip,      JointId::LHip,
    JointId::RKnee, JointId::LKnee, JointId::RAnkle,    JointId::LAnkle,
};

/// Joints that take part in the inter-joint feature vector (every joint except Head).
inline constexpr std::array<JointId, 13> kFeatureJoints = {
    JointId::Neck,  JointId::RShoulder, JointId::LShoulder, JointId::RElbow, JointId::LElbow,
    JointId::RWrist, JointId::LWrist,   JointId::RHip,      JointId::LHip,   JointId::RKnee,
    JointId::LKnee, JointId::RAnkle,    JointId::LAnkle,
};

using JointPair = std::pair<JointId, JointId>;

/// Feature segments in frozen row-major order. Each pair is (source, target); the feature is source - target.
inline constexpr std::array<JointPair, 12> kFeaturePairs = {{
    {JointId::Neck, JointId::RShoulder},
    {JointId::Neck, JointId::LShoulder},
    {JointId::Neck, JointId::RHip},
    {JointId::Neck, JointId::LHip},
    {JointId::RShoulder, JointId::RElbow},
    {JointId::LShoulder, JointId::LElbow},
    {JointId::RHip, JointId::RKnee},
    {JointId::LHip, JointId::LKnee},
    {JointId::RElbow, JointId::RWrist},
    {JointId::LElbow, JointId::LWrist},
    {JointId::RKnee, JointId::RAnkle},
    {JointId::LKnee, JointId::LAnkle},
}};

constexpr int index_of(JointId j) { return static_cast<int>(j); }
constexpr int index_of(Axis a) { return static_cast<int>(a); }
constexpr int track_column(JointId j, Axis a) { return index_of(j) * kAxisCount + index_of(a); }

std::string_view joint_name(JointId j);
std::optional<JointId> joint_from_name(std::string_view name);
char axis_name(Axis a);

/// Per-joint 3D points of one frame, one joint per row.
template <typename Scalar>
using SkeletonPoints = Eigen::Matrix<Scalar, kJointCount, 3>;

/// Frames x 42 track matrix; column `track_column(j, a)` is the time sequence of joint j along axis a.
template <typename Scalar>
using TrackMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, kTrackCount>;

using TrackMatrix = TrackMatrixT<double>;

struct JointObservation {
    double x_px = 0.0;
    double y_px = 0.0;
    double range_m = 0.0;
    bool valid = false;
};

struct RawSkeletonFrame {
    std::int64_t frame_index = 0;
    std::array<JointObservation, kJointCount> joints{};

    const JointObservation& operator[](JointId j) const { return joints[index_of(j)]; }
    JointObservation& operator[](JointId j) { return joints[index_of(j)]; }
};

/// Ingested file content: frames sorted by index plus the per-file labels.
struct RawSequence {
    std::string sequence_id;
    std::string subject;
    std::string walk;
    std::vector<RawSkeletonFrame> frames;
    std::vector<std::string> warnings;
};

enum class PixelOrigin { Center, Corner };

struct CameraParams {
    int n_pixels_x = 128;
    int n_pixels_y = 128;
    double aov_x_deg = 45.0;
    double aov_y_deg = 45.0;
    PixelOrigin origin = PixelOrigin::Center;

    /// Throws DomainError when a field is out of range.
    void validate() const;
};

/// One joint's coordinate along one axis over time. 0.0 marks a missing sample.
template <typename Scalar>
struct BasicJointTrack {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
    Axis axis = Axis::X;
    JointId joint = JointId::Head;

    Index size() const { return values.size(); }
};

using JointTrack = BasicJointTrack<double>;

struct WorldSkeletonSequence {
    std::string sequence_id;
    std::string subject_label;
    std::string walk_type;
    std::vector<std::int64_t> frame_indices;
    TrackMatrix tracks;

    Index frames() const { return tracks.rows(); }

    JointTrack track(JointId j, Axis a) const;
    void set_track(const JointTrack& track);

    SkeletonPoints<double> frame_points(Index frame) const;
    void set_frame_points(Index frame, const SkeletonPoints<double>& points);

    /// Throws ValidationError if frame_indices and tracks disagree in length.
    void validate() const;
};

/// Empty sequence with `frames` rows of zeros and consecutive frame indices.
WorldSkeletonSequence make_sequence(std::string sequence_id, std::string subject, std::string walk, Index frames);

} // namespace lidargait
