#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lidargait/skeleton.hpp"

namespace lidargait {

enum class WalkType { Toward, Diamond, DiamondStick };

WalkType walk_type_from_string(const std::string& name);
std::string to_string(WalkType walk);

/// Body dimensions and gait dynamics of one synthetic walker. Angles are radians.
struct SubjectProfile {
    std::string label = "s01";
    /// Segment lengths in meters, in the feature pair order (Neck-RShoulder, Neck-LShoulder, Neck-RHip, ...).
    std::array<double, 12> limb_lengths = {0.19, 0.19, 0.55, 0.55, 0.30, 0.30, 0.45, 0.45, 0.26, 0.26, 0.43, 0.43};
    double hip_half_width = 0.13;
    double head_length = 0.24;
    double ankle_height = 0.08;
    /// Frames per full stride (two steps).
    double cadence_frames = 20.0;
    double hip_amplitude = 0.40;
    double knee_amplitude = 0.90;
    /// Knee flexion leads the hip swing by this phase.
    double knee_phase = 1.2;
    double shoulder_amplitude = 0.35;
    double elbow_amplitude = 0.30;
    double elbow_bend = 0.25;
    double elbow_phase = 0.5;
    /// Vertical pelvis bob, meters peak to peak.
    double bob_amplitude = 0.03;

    double segment(JointId a, JointId b) const;

    /// Throws ValidationError on non-positive lengths, cadence below 4 frames, or a hip wider than the torso.
    void validate() const;
};

/// Where the walk takes place, in the camera frame (x right, y down, z along the optical axis).
struct WalkScene {
    double camera_height = 2.0;
    double lane_x = 1.0;
    double center_depth = 7.0;
    double half_depth = 2.0;
    /// Lateral half-widths of the closed paths. Toward is a thin loop, Diamond a rounded rhombus.
    double toward_half_width = 0.15;
    double diamond_half_width = 0.45;
    /// Arc length over which the heading is averaged, so turns take a few frames.
    double turn_length = 0.4;
};

struct GaitOptions {
    Index n_frames = 120;
    WalkType walk = WalkType::Toward;
    /// Start position as a fraction of the path loop.
    double path_offset = 0.0;
    /// Gait phase at frame 0, radians.
    double gait_phase = 0.0;
};

/// Clean walking sequence: sinusoidally driven two-link legs and arms carried along the walk path.
/// Throws ValidationError when n_frames is shorter than one cadence.
WorldSkeletonSequence generate_sequence(const SubjectProfile& profile, const GaitOptions& gait,
                                        const WalkScene& scene = {}, std::string sequence_id = {});

struct CorruptionConfig {
    /// Long-run fraction of missing joint-frames.
    double dropout_rate = 0.0;
    /// Mean length of a dropout run (geometric); 1 gives independent per-frame dropout.
    double burst_length = 1.0;
    /// Probability per present joint-frame of a one-frame displacement.
    double jump_rate = 0.0;
    double jump_scale = 0.5;
    /// Standard deviation of Gaussian noise added to every present coordinate.
    double jitter = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

enum class CorruptionKind { Dropout, Jump };

struct CorruptionEntry {
    JointId joint;
    Axis axis;
    Index frame;
    CorruptionKind kind;
};

struct CorruptedSequence {
    WorldSkeletonSequence sequence; ///< dropped joints are zero on all three axes
    std::vector<CorruptionEntry> mask; ///< sorted by (frame, joint, axis)
};

/// Seeded injection of dropout runs, single-frame jumps and optional jitter. Each joint drops out as a
/// whole, so a dropout contributes three mask entries.
CorruptedSequence corrupt_sequence(const WorldSkeletonSequence& seq, const CorruptionConfig& cfg);

/// Back-projects a world sequence to detector output. All-zero joints and joints outside the image are invalid.
RawSequence to_raw_sequence(const WorldSkeletonSequence& seq, const CameraParams& cam);

/// Independent 64-bit stream seed for item `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Walkers in pairs that share every body dimension and differ only in gait dynamics.
std::vector<SubjectProfile> make_population(int n_subjects, std::uint64_t seed);

struct DatasetSpec {
    int n_subjects = 6;
    int seqs_per_subject = 5;
    Index n_frames = 120;
    std::uint64_t seed = 1;
    CorruptionConfig corruption;
    WalkScene scene;
    CameraParams camera;
    /// Used instead of make_population when non-empty.
    std::vector<SubjectProfile> profiles;
};

struct SyntheticSequence {
    WorldSkeletonSequence clean;
    CorruptedSequence corrupted;
    RawSequence raw;
};

/// Walk types cycle through toward, diamond, diamond_stick per subject. Sequence ids are `<subject>_<walk>_<n>`.
std::vector<SyntheticSequence> generate_dataset(const DatasetSpec& spec, int jobs = 1);

/// Writes `<id>.jsonl` detector files into `dir` and clean tracks plus corruption masks into `dir/truth/`.
void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticSequence>& data);

void write_mask_csv(std::ostream& out, const std::vector<CorruptionEntry>& mask);

} // namespace lidargait
