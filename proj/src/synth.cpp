#include "lidargait/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <tuple>

#include "lidargait/errors.hpp"
#include "lidargait/parallel.hpp"
#include "lidargait/projection.hpp"
#include "lidargait/sequence_io.hpp"

namespace lidargait {

namespace {

using Vec3 = Eigen::Vector3d;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Closed superellipse |x/a|^p + |z/b|^p = 1 resampled by arc length.
class WalkPath {
public:
    WalkPath(double half_width, double half_depth, double exponent) {
        constexpr int samples = 4096;
        m_points.reserve(samples + 1);
        m_arc.reserve(samples + 1);
        const double e = 2.0 / exponent;
        auto signed_pow = [e](double v) { return std::copysign(std::pow(std::abs(v), e), v); };
        for (int i = 0; i <= samples; ++i) {
            const double phi = kTwoPi * i / samples;
            m_points.emplace_back(half_width * signed_pow(std::sin(phi)), half_depth * signed_pow(std::cos(phi)));
            m_arc.push_back(i == 0 ? 0.0 : m_arc.back() + (m_points[i] - m_points[i - 1]).norm());
        }
    }

    double length() const { return m_arc.back(); }

    /// (lateral, depth) offset at arc length s, wrapping around the loop.
    Eigen::Vector2d at(double s) const {
        s = std::fmod(s, length());
        if (s < 0.0)
            s += length();
        const auto it = std::upper_bound(m_arc.begin(), m_arc.end(), s);
        const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - m_arc.begin(), 1, m_arc.size() - 1));
        const double span = m_arc[hi] - m_arc[hi - 1];
        const double w = span > 0.0 ? (s - m_arc[hi - 1]) / span : 0.0;
        return (1.0 - w) * m_points[hi - 1] + w * m_points[hi];
    }

private:
    std::vector<Eigen::Vector2d> m_points;
    std::vector<double> m_arc;
};

WalkPath path_for(WalkType walk, const WalkScene& scene) {
    if (walk == WalkType::Toward)
        return WalkPath(scene.toward_half_width, scene.half_depth, 2.0);
    return WalkPath(scene.diamond_half_width, scene.half_depth, 1.25);
}

/// Direction in the sagittal plane at `angle` from straight down, positive toward `forward`.
Vec3 swing(double angle, const Vec3& down, const Vec3& forward) {
    return std::cos(angle) * down + std::sin(angle) * forward;
}

double leg_length(const SubjectProfile& p) {
    return 0.5 * (p.segment(JointId::RHip, JointId::RKnee) + p.segment(JointId::LHip, JointId::LKnee)) +
           0.5 * (p.segment(JointId::RKnee, JointId::RAnkle) + p.segment(JointId::LKnee, JointId::LAnkle));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace

WalkType walk_type_from_string(const std::string& name) {
    if (name == "toward")
        return WalkType::Toward;
    if (name == "diamond")
        return WalkType::Diamond;
    if (name == "diamond_stick")
        return WalkType::DiamondStick;
    throw ValidationError("unknown walk type '" + name + "' (expected toward, diamond or diamond_stick)");
}

std::string to_string(WalkType walk) {
    switch (walk) {
    case WalkType::Toward:
        return "toward";
    case WalkType::Diamond:
        return "diamond";
    case WalkType::DiamondStick:
        return "diamond_stick";
    }
    return {};
}

double SubjectProfile::segment(JointId a, JointId b) const {
    for (std::size_t p = 0; p < kFeaturePairs.size(); ++p)
        if (kFeaturePairs[p] == JointPair{a, b})
            return limb_lengths[p];
    throw ValidationError("no segment between " + std::string(joint_name(a)) + " and " + std::string(joint_name(b)));
}

void SubjectProfile::validate() const {
    for (std::size_t p = 0; p < limb_lengths.size(); ++p)
        if (!(limb_lengths[p] > 0.0))
            throw ValidationError("profile '" + label + "': segment " +
                                  std::string(joint_name(kFeaturePairs[p].first)) + "-" +
                                  std::string(joint_name(kFeaturePairs[p].second)) + " must be positive");
    if (!(cadence_frames >= 4.0))
        throw ValidationError("profile '" + label + "': cadence must be at least 4 frames");
    if (!(hip_half_width >= 0.0) || !(head_length >= 0.0) || !(ankle_height >= 0.0))
        throw ValidationError("profile '" + label + "': hip width, head length and ankle height must be non-negative");
    const double torso = std::min(segment(JointId::Neck, JointId::RHip), segment(JointId::Neck, JointId::LHip));
    if (hip_half_width >= torso)
        throw ValidationError("profile '" + label + "': hip half-width must be shorter than the neck-hip segments");
}

WorldSkeletonSequence generate_sequence(const SubjectProfile& profile, const GaitOptions& gait, const WalkScene& scene,
                                        std::string sequence_id) {
    profile.validate();
    if (static_cast<double>(gait.n_frames) < profile.cadence_frames)
        throw ValidationError("sequence of " + std::to_string(gait.n_frames) + " frames is shorter than one cadence (" +
                              std::to_string(profile.cadence_frames) + ")");
    if (sequence_id.empty())
        sequence_id = profile.label + "_" + to_string(gait.walk);
    auto seq = make_sequence(std::move(sequence_id), profile.label, to_string(gait.walk), gait.n_frames);

    const WalkPath path = path_for(gait.walk, scene);
    const double omega = kTwoPi / profile.cadence_frames;
    const double stride = 4.0 * leg_length(profile) * std::sin(profile.hip_amplitude);
    const double speed = stride / profile.cadence_frames;
    const double start = gait.path_offset * path.length();

    const double hw = profile.hip_half_width;
    const double neck_hip = 0.5 * (profile.segment(JointId::Neck, JointId::RHip) +
                                   profile.segment(JointId::Neck, JointId::LHip));
    const double torso = std::sqrt(neck_hip * neck_hip - hw * hw);
    const double standing = leg_length(profile) + profile.ankle_height;
    const Vec3 down(0.0, 1.0, 0.0);

    for (Index t = 0; t < gait.n_frames; ++t) {
        const double s = start + speed * static_cast<double>(t);
        const Eigen::Vector2d here = path.at(s);
        const Eigen::Vector2d ahead = path.at(s + 0.5 * scene.turn_length) - path.at(s - 0.5 * scene.turn_length);
        const Vec3 forward = Vec3(ahead.x(), 0.0, ahead.y()).normalized();
        const Vec3 right(forward.z(), 0.0, -forward.x());

        const double phase = omega * static_cast<double>(t) + gait.gait_phase;
        const double height = standing - 0.5 * profile.bob_amplitude * (1.0 - std::cos(2.0 * phase));
        const Vec3 pelvis(scene.lane_x + here.x(), scene.camera_height - height, scene.center_depth + here.y());

        SkeletonPoints<double> pts;
        auto put = [&pts](JointId j, const Vec3& v) { pts.row(index_of(j)) = v.transpose(); };

        const Vec3 neck = pelvis - torso * down;
        put(JointId::Neck, neck);
        put(JointId::Head, neck - profile.head_length * down);
        put(JointId::RHip, pelvis + hw * right);
        put(JointId::LHip, pelvis - hw * right);
        put(JointId::RShoulder, neck + profile.segment(JointId::Neck, JointId::RShoulder) * right);
        put(JointId::LShoulder, neck - profile.segment(JointId::Neck, JointId::LShoulder) * right);

        auto leg = [&](JointId hip, JointId knee, JointId ankle, double leg_phase) {
            const double hip_angle = profile.hip_amplitude * std::sin(phase + leg_phase);
            const double knee_flex =
                0.5 * profile.knee_amplitude * (1.0 + std::sin(phase + leg_phase + profile.knee_phase));
            const Vec3 k = pts.row(index_of(hip)).transpose() + profile.segment(hip, knee) * swing(hip_angle, down, forward);
            put(knee, k);
            put(ankle, k + profile.segment(knee, ankle) * swing(hip_angle - knee_flex, down, forward));
        };
        leg(JointId::RHip, JointId::RKnee, JointId::RAnkle, 0.0);
        leg(JointId::LHip, JointId::LKnee, JointId::LAnkle, std::numbers::pi);

        auto arm = [&](JointId shoulder, JointId elbow, JointId wrist, double shoulder_angle, double elbow_flex) {
            const Vec3 e = pts.row(index_of(shoulder)).transpose() +
                           profile.segment(shoulder, elbow) * swing(shoulder_angle, down, forward);
            put(elbow, e);
            put(wrist, e + profile.segment(elbow, wrist) * swing(shoulder_angle + elbow_flex, down, forward));
        };
        auto swinging = [&](double arm_phase) {
            return std::pair{profile.shoulder_amplitude * std::sin(phase + arm_phase),
                             profile.elbow_bend + 0.5 * profile.elbow_amplitude *
                                                      (1.0 + std::sin(phase + arm_phase + profile.elbow_phase))};
        };
        // arms swing against the leg on the same side
        const auto [rs, re] = gait.walk == WalkType::DiamondStick ? std::pair{0.35, 1.1} : swinging(std::numbers::pi);
        arm(JointId::RShoulder, JointId::RElbow, JointId::RWrist, rs, re);
        const auto [ls, le] = swinging(0.0);
        arm(JointId::LShoulder, JointId::LElbow, JointId::LWrist, ls, le);

        seq.set_frame_points(t, pts);
    }
    return seq;
}

void CorruptionConfig::validate() const {
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw ValidationError("dropout_rate must lie in [0, 1)");
    if (!(jump_rate >= 0.0 && jump_rate <= 1.0))
        throw ValidationError("jump_rate must lie in [0, 1]");
    if (!(burst_length >= 1.0))
        throw ValidationError("burst_length must be at least 1");
    if (!(jump_scale >= 0.0) || !(jitter >= 0.0))
        throw ValidationError("jump_scale and jitter must be non-negative");
}

CorruptedSequence corrupt_sequence(const WorldSkeletonSequence& seq, const CorruptionConfig& cfg) {
    cfg.validate();
    CorruptedSequence out{seq, {}};
    auto& tracks = out.sequence.tracks;
    const Index n = seq.frames();
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // a run starts on a present frame with probability q; runs have mean length m, so the missing
    // fraction is q m / (q m + 1 - q)
    const double m = cfg.burst_length;
    const double start_prob = cfg.dropout_rate / (m * (1.0 - cfg.dropout_rate) + cfg.dropout_rate);
    std::geometric_distribution<long> extra(1.0 / m);

    for (JointId j : kAllJoints) {
        const int c = track_column(j, Axis::X);
        long remaining = 0;
        for (Index t = 0; t < n; ++t) {
            bool drop = false;
            if (remaining > 0) {
                drop = true;
                --remaining;
            } else if (cfg.dropout_rate > 0.0 && unit(rng) < start_prob) {
                drop = true;
                remaining = m > 1.0 ? extra(rng) : 0;
            }
            if (drop) {
                tracks.block(t, c, 1, 3).setZero();
                for (Axis a : {Axis::X, Axis::Y, Axis::Z})
                    out.mask.push_back({j, a, t, CorruptionKind::Dropout});
                continue;
            }
            if (cfg.jitter > 0.0)
                for (int a = 0; a < 3; ++a)
                    tracks(t, c + a) += cfg.jitter * gauss(rng);
            if (cfg.jump_rate > 0.0 && unit(rng) < cfg.jump_rate) {
                Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
                dir /= std::max(dir.norm(), 1e-12);
                tracks.block(t, c, 1, 3) += cfg.jump_scale * dir.transpose();
                for (Axis a : {Axis::X, Axis::Y, Axis::Z})
                    out.mask.push_back({j, a, t, CorruptionKind::Jump});
            }
        }
    }
    std::sort(out.mask.begin(), out.mask.end(), [](const CorruptionEntry& a, const CorruptionEntry& b) {
        return std::tuple(a.frame, index_of(a.joint), index_of(a.axis)) <
               std::tuple(b.frame, index_of(b.joint), index_of(b.axis));
    });
    return out;
}

RawSequence to_raw_sequence(const WorldSkeletonSequence& seq, const CameraParams& cam) {
    cam.validate();
    RawSequence raw;
    raw.sequence_id = seq.sequence_id;
    raw.subject = seq.subject_label;
    raw.walk = seq.walk_type;
    for (Index t = 0; t < seq.frames(); ++t) {
        const SkeletonPoints<double> pts = seq.frame_points(t);
        std::bitset<kJointCount> valid;
        for (int j = 0; j < kJointCount; ++j)
            valid.set(static_cast<std::size_t>(j), !pts.row(j).isZero(0.0));
        raw.frames.push_back(to_raw_frame(seq.frame_indices[static_cast<std::size_t>(t)], pts, valid, cam));
    }
    return raw;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the combined state
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<SubjectProfile> make_population(int n_subjects, std::uint64_t seed) {
    if (n_subjects < 1)
        throw ValidationError("population needs at least one subject");
    std::vector<SubjectProfile> out;
    std::mt19937_64 rng(derive_seed(seed, 0x706f70));
    for (int pair = 0; 2 * pair < n_subjects; ++pair) {
        SubjectProfile body;
        const double shoulder = uniform(rng, 0.16, 0.22);
        const double torso = uniform(rng, 0.50, 0.62);
        const double upper_arm = uniform(rng, 0.26, 0.34);
        const double thigh = uniform(rng, 0.40, 0.50);
        const double forearm = uniform(rng, 0.22, 0.29);
        const double shank = uniform(rng, 0.38, 0.47);
        body.limb_lengths = {shoulder, shoulder, torso, torso, upper_arm, upper_arm,
                             thigh,    thigh,    forearm, forearm, shank,  shank};
        body.hip_half_width = uniform(rng, 0.11, 0.15);
        body.head_length = uniform(rng, 0.20, 0.26);

        for (int twin = 0; twin < 2 && 2 * pair + twin < n_subjects; ++twin) {
            SubjectProfile p = body;
            char label[16];
            std::snprintf(label, sizeof label, "s%02d", 2 * pair + twin + 1);
            p.label = label;
            // twins swing through the same poses at different tempo, so only their dynamics tell them apart
            if (twin == 0) {
                p.cadence_frames = 16.0 + 2.0 * std::floor(uniform(rng, 0.0, 3.0));
                p.hip_amplitude = uniform(rng, 0.34, 0.46);
                p.knee_amplitude = uniform(rng, 0.80, 1.00);
                p.shoulder_amplitude = uniform(rng, 0.25, 0.45);
                p.elbow_amplitude = uniform(rng, 0.20, 0.40);
                p.knee_phase = uniform(rng, 1.0, 1.4);
            } else {
                const SubjectProfile& sibling = out.back();
                p.cadence_frames = sibling.cadence_frames + 6.0 + 2.0 * std::floor(uniform(rng, 0.0, 2.0));
                p.hip_amplitude = sibling.hip_amplitude * uniform(rng, 0.97, 1.03);
                p.knee_amplitude = sibling.knee_amplitude * uniform(rng, 0.97, 1.03);
                p.shoulder_amplitude = sibling.shoulder_amplitude * uniform(rng, 0.97, 1.03);
                p.elbow_amplitude = sibling.elbow_amplitude * uniform(rng, 0.97, 1.03);
                p.knee_phase = sibling.knee_phase;
            }
            p.elbow_phase = uniform(rng, 0.3, 0.7);
            p.bob_amplitude = uniform(rng, 0.02, 0.04);
            out.push_back(p);
        }
    }
    return out;
}

std::vector<SyntheticSequence> generate_dataset(const DatasetSpec& spec, int jobs) {
    if (spec.seqs_per_subject < 1)
        throw ValidationError("need at least one sequence per subject");
    spec.corruption.validate();
    spec.camera.validate();
    const auto profiles = spec.profiles.empty() ? make_population(spec.n_subjects, spec.seed) : spec.profiles;

    struct Job {
        const SubjectProfile* profile;
        WalkType walk;
        std::string id;
        std::uint64_t seed;
    };
    constexpr std::array<WalkType, 3> walks = {WalkType::Toward, WalkType::Diamond, WalkType::DiamondStick};
    std::vector<Job> work;
    for (const auto& p : profiles) {
        for (int k = 0; k < spec.seqs_per_subject; ++k) {
            const WalkType walk = walks[static_cast<std::size_t>(k) % walks.size()];
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "_%02d", k);
            work.push_back({&p, walk, p.label + "_" + to_string(walk) + suffix,
                            derive_seed(spec.seed, static_cast<std::uint64_t>(work.size()))});
        }
    }

    std::vector<SyntheticSequence> out(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t i) {
        const Job& job = work[i];
        std::mt19937_64 rng(job.seed);
        SubjectProfile p = *job.profile;
        // small per-walk variation of the swing so no two sequences of a subject are identical
        for (double* amp : {&p.hip_amplitude, &p.knee_amplitude, &p.shoulder_amplitude, &p.elbow_amplitude})
            *amp *= uniform(rng, 0.96, 1.04);
        GaitOptions gait;
        gait.n_frames = spec.n_frames;
        gait.walk = job.walk;
        gait.path_offset = uniform(rng, 0.0, 1.0);
        gait.gait_phase = uniform(rng, 0.0, kTwoPi);
        auto& s = out[i];
        s.clean = generate_sequence(p, gait, spec.scene, job.id);
        CorruptionConfig corruption = spec.corruption;
        corruption.rng_seed = derive_seed(spec.corruption.rng_seed ^ job.seed, 1);
        s.corrupted = corrupt_sequence(s.clean, corruption);
        s.raw = to_raw_sequence(s.corrupted.sequence, spec.camera);
    });
    return out;
}

void write_mask_csv(std::ostream& out, const std::vector<CorruptionEntry>& mask) {
    out << "frame,joint,axis,kind\n";
    for (const auto& e : mask)
        out << e.frame << ',' << joint_name(e.joint) << ',' << axis_name(e.axis) << ','
            << (e.kind == CorruptionKind::Dropout ? "dropout" : "jump") << '\n';
}

void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticSequence>& data) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "truth");
    for (const auto& s : data) {
        save_sequence(dir / (s.raw.sequence_id + ".jsonl"), s.raw);
        save_world_csv(dir / "truth" / (s.clean.sequence_id + ".world.csv"), s.clean);
        std::ofstream mask(dir / "truth" / (s.clean.sequence_id + ".mask.csv"));
        if (!mask)
            throw ValidationError("cannot write " + (dir / "truth").string());
        write_mask_csv(mask, s.corrupted.mask);
    }
}

} // namespace lidargait
