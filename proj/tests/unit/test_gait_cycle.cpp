#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "lidargait/gait_cycle.hpp"
#include "lidargait/synth.hpp"

using namespace lidargait;

namespace {

Eigen::VectorXd abs_sine(int n, double half_period, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int t = 0; t < n; ++t)
        v(t) = scale * (0.1 + std::abs(std::sin(std::numbers::pi * t / half_period)));
    return v;
}

// local maxima by brute force: strictly above the left neighbour, at least the right one, with a plateau
// resolved to its left-middle sample
std::vector<Index> naive_maxima(const Eigen::VectorXd& v) {
    std::vector<Index> out;
    for (Index i = 1; i + 1 < v.size(); ++i) {
        if (!(v(i) > v(i - 1)))
            continue;
        Index j = i;
        while (j + 1 < v.size() && v(j + 1) == v(i))
            ++j;
        if (j + 1 < v.size() && v(j + 1) < v(i))
            out.push_back(i + (j - i) / 2);
    }
    return out;
}

} // namespace

TEST(AnkleDistance, Examples) {
    auto seq = make_sequence("a", "s", "w", 3);
    EXPECT_TRUE(ankle_distance(seq).isZero());
    SkeletonPoints<double> pts = SkeletonPoints<double>::Zero();
    pts.row(index_of(JointId::LAnkle)) << 0.3, 0.4, 0.0;
    seq.set_frame_points(1, pts);
    EXPECT_DOUBLE_EQ(ankle_distance(seq)(1), 0.5);
}

TEST(AnkleDistance, HalfCadencePeriod) {
    SubjectProfile p;
    p.cadence_frames = 20;
    GaitOptions g;
    g.n_frames = 100;
    const auto d = ankle_distance(generate_sequence(p, g));
    const auto peaks = find_peaks(d, 0.05);
    EXPECT_EQ(peaks.size(), 10u);
    for (std::size_t i = 1; i < peaks.size(); ++i)
        EXPECT_EQ(peaks[i] - peaks[i - 1], 10);
    for (Index t = 0; t + 10 < d.size(); ++t)
        EXPECT_NEAR(d(t), d(t + 10), 1e-9);
}

TEST(FindPeaks, MatchesBruteForceMaxima) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> level(0, 6);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd v(40);
        for (Index i = 0; i < v.size(); ++i)
            v(i) = level(rng);
        EXPECT_EQ(find_peaks(v, 0.0), naive_maxima(v)) << "trial " << trial;
    }
}

TEST(FindPeaks, Prominence) {
    Eigen::VectorXd v(7);
    v << 0, 3, 1, 2, 0.5, 4, 0;
    EXPECT_DOUBLE_EQ(peak_prominence(v, 1), 2.5);
    EXPECT_DOUBLE_EQ(peak_prominence(v, 3), 1.0);
    EXPECT_DOUBLE_EQ(peak_prominence(v, 5), 4.0);
    EXPECT_EQ(find_peaks(v, 1.5), (std::vector<Index>{1, 5}));
}

TEST(EstimateCycle, AbsSine) {
    const auto est = estimate_cycle(abs_sine(100, 10.0), CycleOptions{});
    EXPECT_FALSE(est.fallback);
    EXPECT_EQ(est.cycle_frames, 20);
    for (int c : est.candidate_cycles)
        EXPECT_EQ(c, 20);
}

TEST(EstimateCycle, IqrTrim) {
    const auto kept = trim_cycles({20, 20, 20, 20, 3, 60}, CycleOptions{});
    EXPECT_EQ(kept, (std::vector<int>{20, 20, 20, 20}));
}

TEST(EstimateCycle, PercentileTrim) {
    CycleOptions opts;
    opts.trim = TrimRule::Percentile;
    opts.lower_percentile = 20;
    opts.upper_percentile = 80;
    EXPECT_EQ(trim_cycles({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, opts), (std::vector<int>{3, 4, 5, 6, 7, 8, 9}));
}

TEST(EstimateCycle, TrimKeepsEqualCandidates) {
    for (int c : {4, 17, 33})
        EXPECT_EQ(trim_cycles(std::vector<int>(7, c), CycleOptions{}).size(), 7u);
}

TEST(EstimateCycle, FlatSeriesFallsBack) {
    CycleOptions opts;
    opts.fallback_cycle = 23;
    const auto est = estimate_cycle(Eigen::VectorXd::Constant(50, 0.4), opts);
    EXPECT_TRUE(est.fallback);
    EXPECT_EQ(est.cycle_frames, 23);
    EXPECT_FALSE(est.warnings.empty());
    EXPECT_TRUE(estimate_cycle(Eigen::VectorXd::Ones(2), opts).fallback);
}

TEST(EstimateCycle, ModeTieGoesToSmaller) {
    // the lone 18 falls outside the fences here, then ties 18 / 19 in the second series
    Eigen::VectorXd v = Eigen::VectorXd::Zero(60);
    for (Index p : {2, 11, 20, 30, 39, 49, 58})
        v(p) = 1.0;
    const auto est = estimate_cycle(v, CycleOptions{});
    EXPECT_EQ(est.candidate_cycles, (std::vector<int>{18, 19, 19, 19, 19}));
    EXPECT_EQ(est.cycle_frames, 19);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(60);
    for (Index p : {2, 11, 20, 30, 39, 48})
        w(p) = 1.0;
    EXPECT_EQ(estimate_cycle(w, CycleOptions{}).candidate_cycles, (std::vector<int>{18, 19, 19, 18}));
    EXPECT_EQ(estimate_cycle(w, CycleOptions{}).cycle_frames, 18);
}

TEST(EstimateCycle, ScaleInvariant) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.03);
    std::uniform_real_distribution<double> scale(0.1, 20.0), hp(6.0, 18.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd v = abs_sine(150, hp(rng));
        for (Index i = 0; i < v.size(); ++i)
            v(i) += noise(rng);
        const double s = scale(rng);
        CycleOptions opts;
        const auto a = estimate_cycle(v, opts);
        opts.min_prominence *= s;
        const auto b = estimate_cycle(v * s, opts);
        EXPECT_EQ(a.cycle_frames, b.cycle_frames);
        EXPECT_EQ(a.peaks, b.peaks);
    }
}

TEST(VoteGlobalCycle, IgnoresFallbacks) {
    CycleEstimate a, b, c;
    a.cycle_frames = 18;
    b.cycle_frames = 18;
    c.cycle_frames = 20;
    c.fallback = true;
    EXPECT_EQ(vote_global_cycle({a, c, c, b}), 18);
    EXPECT_EQ(vote_global_cycle({c}), 20);
    EXPECT_THROW(vote_global_cycle({}), ValidationError);
}

TEST(Concatenate, SingleWindow) {
    FeatureMatrix f = FeatureMatrix::Random(5, 36);
    const auto w = concatenate_features(f, 5);
    ASSERT_EQ(w.values.rows(), 1);
    EXPECT_EQ(w.values.cols(), 180);
    for (Index r = 0; r < 5; ++r)
        EXPECT_EQ(w.values.row(0).segment(36 * r, 36), f.row(r));
}

TEST(Concatenate, SlidingStarts) {
    FeatureMatrix f = FeatureMatrix::Random(7, 36);
    const auto w = concatenate_features(f, 5);
    EXPECT_EQ(w.values.rows(), 3);
    EXPECT_EQ(w.start_frames, (std::vector<Index>{0, 1, 2}));
    EXPECT_EQ(w.values.row(2).tail(36), f.row(6));
}

TEST(Concatenate, WindowOfOneIsIdentity) {
    FeatureMatrix f = FeatureMatrix::Random(9, 36);
    EXPECT_EQ(concatenate_features(f, 1).values, f);
}

TEST(Concatenate, CountProperty) {
    for (int frames = 0; frames < 30; ++frames)
        for (int c = 1; c < 12; ++c) {
            const auto w = concatenate_features(FeatureMatrix::Zero(frames, 3), c);
            EXPECT_EQ(w.values.rows(), std::max(0, frames - c + 1));
            EXPECT_EQ(w.values.cols(), 3 * c);
            EXPECT_EQ(w.warnings.empty(), frames >= c);
        }
    EXPECT_EQ(concatenate_features(FeatureMatrix::Zero(10, 3), 3, 4).start_frames, (std::vector<Index>{0, 4}));
}
