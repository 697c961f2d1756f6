#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "lidargait/errors.hpp"
#include "lidargait/projection.hpp"
#include "lidargait/sequence_io.hpp"
#include "lidargait/skeleton.hpp"

using namespace lidargait;

namespace {

std::string full_record(int frame, const std::string& skip = {}) {
    std::ostringstream os;
    os << R"({"frame": )" << frame << R"(, "subject": "s01", "walk": "toward", "joints": {)";
    bool first = true;
    for (auto name : kJointNames) {
        if (name == skip)
            continue;
        os << (first ? "" : ", ") << '"' << name << R"(": [64.5, 30.25, 6.5])";
        first = false;
    }
    os << "}}\n";
    return os.str();
}

RawSequence random_sequence(std::mt19937_64& rng, int frames) {
    std::uniform_real_distribution<double> px(0.0, 127.0), range(1.0, 12.0), u(0.0, 1.0);
    RawSequence seq;
    seq.subject = "s07";
    seq.walk = "diamond";
    for (int f = 0; f < frames; ++f) {
        RawSkeletonFrame frame;
        frame.frame_index = 3 * f + 1;
        for (auto& obs : frame.joints) {
            if (u(rng) < 0.2)
                continue;
            obs = {px(rng), px(rng), range(rng), true};
        }
        seq.frames.push_back(frame);
    }
    return seq;
}

void expect_same_frames(const RawSequence& a, const RawSequence& b) {
    ASSERT_EQ(a.frames.size(), b.frames.size());
    EXPECT_EQ(a.subject, b.subject);
    EXPECT_EQ(a.walk, b.walk);
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        EXPECT_EQ(a.frames[f].frame_index, b.frames[f].frame_index);
        for (int j = 0; j < kJointCount; ++j) {
            const auto& x = a.frames[f].joints[j];
            const auto& y = b.frames[f].joints[j];
            ASSERT_EQ(x.valid, y.valid);
            if (x.valid) {
                EXPECT_EQ(x.x_px, y.x_px);
                EXPECT_EQ(x.y_px, y.y_px);
                EXPECT_EQ(x.range_m, y.range_m);
            }
        }
    }
}

} // namespace

TEST(Skeleton, JointNamesRoundTrip) {
    EXPECT_EQ(kAllJoints.size(), 14u);
    for (JointId j : kAllJoints)
        EXPECT_EQ(joint_from_name(joint_name(j)), j);
    EXPECT_FALSE(joint_from_name("Nose").has_value());
}

TEST(Skeleton, FeatureJointsAreAllButHead) {
    EXPECT_EQ(kFeatureJoints.size(), 13u);
    for (JointId j : kFeatureJoints)
        EXPECT_NE(j, JointId::Head);
}

TEST(LoadSequence, OneFullFrame) {
    std::istringstream in(full_record(0));
    const auto seq = read_sequence_jsonl(in, "one");
    ASSERT_EQ(seq.frames.size(), 1u);
    for (const auto& obs : seq.frames[0].joints)
        EXPECT_TRUE(obs.valid);
    EXPECT_EQ(seq.subject, "s01");
    EXPECT_EQ(seq.walk, "toward");
}

TEST(LoadSequence, AbsentJointIsMissing) {
    std::istringstream in(full_record(0, "LAnkle"));
    const auto seq = read_sequence_jsonl(in);
    ASSERT_EQ(seq.frames.size(), 1u);
    EXPECT_FALSE(seq.frames[0][JointId::LAnkle].valid);
    EXPECT_TRUE(seq.frames[0][JointId::RAnkle].valid);
}

TEST(LoadSequence, DuplicateFrameRejected) {
    std::istringstream in(full_record(5) + full_record(5));
    EXPECT_THROW(read_sequence_jsonl(in), ValidationError);
}

TEST(LoadSequence, FramesComeBackSorted) {
    std::istringstream in(full_record(7) + full_record(2) + full_record(4));
    const auto seq = read_sequence_jsonl(in);
    ASSERT_EQ(seq.frames.size(), 3u);
    EXPECT_EQ(seq.frames[0].frame_index, 2);
    EXPECT_EQ(seq.frames[1].frame_index, 4);
    EXPECT_EQ(seq.frames[2].frame_index, 7);
}

TEST(LoadSequence, MalformedLineNamesLineNumber) {
    std::istringstream in(full_record(0) + "\n{not json}\n");
    try {
        read_sequence_jsonl(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadSequence, NullJointAndUnknownJoint) {
    std::istringstream in(
        R"({"frame": 0, "subject": "a", "walk": "w", "joints": {"Neck": null, "Nose": [1, 2, 3], "Head": [1, 2, 3]}})");
    const auto seq = read_sequence_jsonl(in);
    EXPECT_FALSE(seq.frames[0][JointId::Neck].valid);
    EXPECT_TRUE(seq.frames[0][JointId::Head].valid);
    EXPECT_EQ(seq.warnings.size(), 1u);
}

TEST(LoadSequence, NonPositiveRangeIsMissing) {
    std::istringstream in(R"({"frame": 0, "subject": "a", "walk": "w", "joints": {"Head": [1, 2, 0]}})");
    const auto seq = read_sequence_jsonl(in);
    EXPECT_FALSE(seq.frames[0][JointId::Head].valid);
}

TEST(LoadSequence, InconsistentSubjectRejected) {
    std::istringstream in(full_record(0) +
                          R"({"frame": 1, "subject": "s02", "walk": "toward", "joints": {}})" "\n");
    EXPECT_THROW(read_sequence_jsonl(in), ValidationError);
}

TEST(LoadSequence, JsonlRoundTrip) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto seq = random_sequence(rng, 1 + trial);
        std::ostringstream out;
        write_sequence_jsonl(out, seq);
        std::istringstream in(out.str());
        const auto back = read_sequence_jsonl(in);
        expect_same_frames(seq, back);
        std::ostringstream again;
        write_sequence_jsonl(again, back);
        EXPECT_EQ(out.str(), again.str());
    }
}

TEST(LoadSequence, CsvRoundTrip) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto seq = random_sequence(rng, 1 + trial);
        std::ostringstream out;
        write_sequence_csv(out, seq);
        std::istringstream in(out.str());
        const auto back = read_sequence_csv(in);
        expect_same_frames(seq, back);
        std::ostringstream again;
        write_sequence_csv(again, back);
        EXPECT_EQ(out.str(), again.str());
    }
}

TEST(LoadSequence, FormatFromExtension) {
    EXPECT_EQ(format_from_path("a/b.jsonl"), SequenceFormat::Jsonl);
    EXPECT_EQ(format_from_path("b.csv"), SequenceFormat::Csv);
    EXPECT_THROW(format_from_path("b.txt"), ValidationError);
}

TEST(WorldCsv, RoundTripIsExact) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 3.0);
    auto seq = make_sequence("seq", "s01", "toward", 9);
    for (Index r = 0; r < seq.tracks.rows(); ++r)
        for (Index c = 0; c < seq.tracks.cols(); ++c)
            seq.tracks(r, c) = (r + c) % 7 == 0 ? 0.0 : g(rng);
    std::ostringstream out;
    write_world_csv(out, seq);
    std::istringstream in(out.str());
    const auto back = read_world_csv(in);
    EXPECT_EQ(back.sequence_id, "seq");
    EXPECT_EQ(back.subject_label, "s01");
    EXPECT_EQ(back.frame_indices, seq.frame_indices);
    EXPECT_EQ(back.tracks, seq.tracks);
}

TEST(FormatDouble, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
        EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(SplitCsvLine, QuotedCommas) {
    const auto fields = split_csv_line(R"(a,"b,c",,d)");
    ASSERT_EQ(fields.size(), 4u);
    EXPECT_EQ(fields[1], "b,c");
    EXPECT_EQ(fields[2], "");
}

TEST(TracksFromFrames, SentinelForMissing) {
    std::vector<RawSkeletonFrame> frames(3);
    std::vector<ProjectedFrame> world(3);
    for (int f = 0; f < 3; ++f) {
        frames[f].frame_index = f;
        frames[f].joints[index_of(JointId::Neck)].valid = true;
        world[f].points(index_of(JointId::Neck), 0) = 1.0 + f;
        world[f].valid.set(index_of(JointId::Neck));
    }
    world[1].valid.reset(index_of(JointId::Neck));
    const TrackMatrix tracks = tracks_from_frames(frames, world);
    ASSERT_EQ(tracks.rows(), 3);
    const auto col = tracks.col(track_column(JointId::Neck, Axis::X));
    EXPECT_EQ(col(0), 1.0);
    EXPECT_EQ(col(1), 0.0);
    EXPECT_EQ(col(2), 3.0);
}

TEST(TracksFromFrames, EmptyAndMismatch) {
    EXPECT_EQ(tracks_from_frames({}, {}).rows(), 0);
    std::vector<RawSkeletonFrame> frames(2);
    std::vector<ProjectedFrame> world(1);
    EXPECT_THROW(tracks_from_frames(frames, world), ValidationError);
}

TEST(WorldSequence, TrackAccessorsAgree) {
    auto seq = make_sequence("x", "s", "w", 4);
    JointTrack t;
    t.joint = JointId::RKnee;
    t.axis = Axis::Y;
    t.values = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
    seq.set_track(t);
    EXPECT_EQ(seq.track(JointId::RKnee, Axis::Y).values, t.values);
    EXPECT_EQ(seq.frame_points(2)(index_of(JointId::RKnee), 1), 3.0);
    seq.frame_indices.pop_back();
    EXPECT_THROW(seq.validate(), ValidationError);
}
