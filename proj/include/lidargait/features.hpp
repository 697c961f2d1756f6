#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lidargait/errors.hpp"
#include "lidargait/skeleton.hpp"

namespace lidargait {

inline constexpr int kFrameFeatureSize = 3 * static_cast<int>(kFeaturePairs.size());

template <typename Scalar>
using FrameFeatureT = Eigen::Matrix<Scalar, kFrameFeatureSize, 1>;
using FrameFeature = FrameFeatureT<double>;

/// One feature vector per row; rows are contiguous so consecutive frames can be flattened in place.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-frame feature families. JointVectors is the 36-dim inter-joint vector; the other two are the reduced
/// baselines (12 segment lengths; 12 vectors from Neck to every other feature joint).
enum class FeatureScheme { JointVectors, JointDistances, ReferenceVectors };

enum class MissingJoints { Reject, Allow };

/// Coordinates of joint i minus those of joint j.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, 3> joint_vector(const Eigen::MatrixBase<Derived>& points, JointId i,
                                                           JointId j) {
    return points.row(index_of(i)) - points.row(index_of(j));
}

/// 36-dim inter-joint vector feature of one 14x3 skeleton, pairs in frozen order, (dx, dy, dz) per pair.
template <typename Derived>
FrameFeatureT<typename Derived::Scalar> frame_feature(const Eigen::MatrixBase<Derived>& points,
                                                      MissingJoints policy = MissingJoints::Reject) {
    static_assert(Derived::RowsAtCompileTime == kJointCount || Derived::RowsAtCompileTime == Eigen::Dynamic);
    using Scalar = typename Derived::Scalar;
    if (policy == MissingJoints::Reject) {
        for (JointId j : kFeatureJoints) {
            if ((points.row(index_of(j)).array() == Scalar(0)).any())
                throw ContractViolation("frame_feature: joint " + std::string(joint_name(j)) +
                                        " is missing; repair must run before feature extraction");
        }
    }
    FrameFeatureT<Scalar> f;
    for (std::size_t p = 0; p < kFeaturePairs.size(); ++p)
        f.template segment<3>(3 * static_cast<Eigen::Index>(p)) =
            joint_vector(points, kFeaturePairs[p].first, kFeaturePairs[p].second).transpose();
    return f;
}

int feature_dimension(FeatureScheme scheme);
std::vector<std::string> feature_column_names(FeatureScheme scheme);

/// Feature rows of a whole sequence (frames x feature_dimension(scheme)).
FeatureMatrix sequence_features(const WorldSkeletonSequence& seq, FeatureScheme scheme = FeatureScheme::JointVectors,
                                MissingJoints policy = MissingJoints::Reject);

FeatureScheme feature_scheme_from_string(const std::string& name);
std::string to_string(FeatureScheme scheme);

/// Per-sequence frame features plus the labels needed downstream.
struct SequenceFeatures {
    std::string sequence_id;
    std::string subject_label;
    std::string walk_type;
    FeatureScheme scheme = FeatureScheme::JointVectors;
    std::vector<std::int64_t> frame_indices;
    FeatureMatrix values;
};

SequenceFeatures extract_features(const WorldSkeletonSequence& seq, FeatureScheme scheme, MissingJoints policy);

/// CSV artifact: `#` metadata header, then `sequence,frame,<feature columns>`, one row per frame.
void write_features_csv(std::ostream& out, const SequenceFeatures& features);
SequenceFeatures read_features_csv(std::istream& in);
void save_features_csv(const std::filesystem::path& path, const SequenceFeatures& features);
SequenceFeatures load_features_csv(const std::filesystem::path& path);

} // namespace lidargait
