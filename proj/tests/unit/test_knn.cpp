#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "lidargait/knn.hpp"

using namespace lidargait;

namespace {

LabeledDataset points(const std::vector<std::pair<std::vector<double>, std::string>>& rows) {
    LabeledDataset d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [v, label] = rows[i];
        FeatureMatrix m(1, static_cast<Index>(v.size()));
        for (std::size_t c = 0; c < v.size(); ++c)
            m(0, static_cast<Index>(c)) = v[c];
        d.append(m, label, label + std::to_string(i), "w");
    }
    return d;
}

LabeledDataset random_dataset(std::mt19937_64& rng, int n, int dim, int levels) {
    std::uniform_int_distribution<int> q(0, levels), lab(0, 3);
    LabeledDataset d;
    for (int i = 0; i < n; ++i) {
        FeatureMatrix m(1, dim);
        for (int c = 0; c < dim; ++c)
            m(0, c) = q(rng);
        d.append(m, std::string(1, static_cast<char>('a' + lab(rng))), "seq" + std::to_string(i), "w", {i});
    }
    return d;
}

// brute force: sort every training row by (distance, feature bytes, metadata), vote over the first k
std::string naive_predict(const Eigen::RowVectorXd& q, const LabeledDataset& d, int k) {
    std::vector<Index> idx(static_cast<std::size_t>(d.size()));
    for (Index i = 0; i < d.size(); ++i)
        idx[static_cast<std::size_t>(i)] = i;
    auto key = [&](Index i) {
        const auto s = static_cast<std::size_t>(i);
        std::vector<double> f(d.features.row(i).begin(), d.features.row(i).end());
        return std::make_tuple((d.features.row(i) - q).cwiseAbs().sum(), f, d.labels[s], d.sequence_ids[s],
                               d.walk_types[s], d.start_frames[s]);
    };
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return key(a) < key(b); });
    std::map<std::string, std::pair<int, double>> votes;
    for (int i = 0; i < std::min<Index>(k, d.size()); ++i) {
        auto& v = votes[d.labels[static_cast<std::size_t>(idx[i])]];
        v.first += 1;
        v.second += std::get<0>(key(idx[i]));
    }
    std::string best;
    std::pair<int, double> best_vote{-1, 0.0};
    for (const auto& [label, v] : votes)
        if (v.first > best_vote.first || (v.first == best_vote.first && v.second < best_vote.second)) {
            best = label;
            best_vote = v;
        }
    return best;
}

} // namespace

TEST(Manhattan, Distance) {
    Eigen::RowVector3d a(1, -2, 3), b(0, 2, 3.5);
    EXPECT_DOUBLE_EQ(manhattan_distance(a, b), 5.5);
}

TEST(KnnPredict, SinglePoint) {
    const auto d = points({{{1.0, 2.0}, "A"}});
    EXPECT_EQ(knn_predict(Eigen::RowVector2d(-50, 7), d, 1), "A");
}

TEST(KnnPredict, MajorityBeatsNearest) {
    const auto d = points({{{1.0}, "A"}, {{2.0}, "B"}, {{-2.0}, "B"}, {{9.0}, "A"}});
    EXPECT_EQ(knn_predict(Eigen::RowVectorXd::Zero(1), d, 3), "B");
}

TEST(KnnPredict, ExactMatch) {
    const auto d = points({{{1.0, 1.0}, "A"}, {{1.5, 1.0}, "B"}, {{3.0, 0.0}, "C"}});
    EXPECT_EQ(knn_predict(Eigen::RowVector2d(1.5, 1.0), d, 1), "B");
}

TEST(KnnPredict, LabelTieGoesToCloserSum) {
    const auto d = points({{{1.0}, "B"}, {{-3.0}, "B"}, {{2.0}, "A"}, {{-1.5}, "A"}});
    EXPECT_EQ(knn_predict(Eigen::RowVectorXd::Zero(1), d, 4), "A");
}

TEST(KnnPredict, FullTieGoesToSmallerLabel) {
    const auto d = points({{{1.0}, "B"}, {{-1.0}, "A"}});
    EXPECT_EQ(knn_predict(Eigen::RowVectorXd::Zero(1), d, 2), "A");
}

TEST(KnnPredict, DistanceTieUsesCanonicalOrder) {
    // both at distance 1; the row with the smaller feature values wins regardless of insertion order
    const auto d1 = points({{{1.0}, "B"}, {{-1.0}, "A"}});
    const auto d2 = points({{{-1.0}, "A"}, {{1.0}, "B"}});
    EXPECT_EQ(knn_predict(Eigen::RowVectorXd::Zero(1), d1, 1), "A");
    EXPECT_EQ(knn_predict(Eigen::RowVectorXd::Zero(1), d2, 1), "A");
}

TEST(KnnPredict, KClampedWithWarning) {
    const auto d = points({{{1.0}, "A"}, {{2.0}, "B"}});
    std::vector<std::string> warnings;
    EXPECT_EQ(knn_predict(Eigen::RowVectorXd::Zero(1), d, 7, Metric::Manhattan, &warnings), "A");
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(KnnPredict, Errors) {
    const auto d = points({{{1.0, 2.0}, "A"}});
    EXPECT_THROW(knn_predict(Eigen::RowVector3d(0, 0, 0), d, 1), ValidationError);
    EXPECT_THROW(knn_predict(Eigen::RowVector2d(0, 0), d, 0), ValidationError);
    EXPECT_THROW(knn_predict(Eigen::RowVector2d(0, 0), LabeledDataset{}, 1), ValidationError);
    LabeledDataset bad = d;
    EXPECT_THROW(bad.append(FeatureMatrix::Zero(1, 3), "B", "x", "w"), ValidationError);
}

TEST(KnnPredict, MatchesBruteForce) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = random_dataset(rng, 60, 4, 3);
        const auto queries = random_dataset(rng, 50, 4, 3);
        const KnnClassifier knn(d, 1 + trial % 9);
        for (Index q = 0; q < queries.size(); ++q)
            ASSERT_EQ(knn.predict(queries.features.row(q)), naive_predict(queries.features.row(q), d, knn.k()));
    }
}

TEST(KnnPredict, PermutationInvariant) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_dataset(rng, 50, 3, 2);
        std::vector<Index> perm(static_cast<std::size_t>(d.size()));
        for (Index i = 0; i < d.size(); ++i)
            perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        LabeledDataset shuffled;
        for (Index i : perm) {
            const auto s = static_cast<std::size_t>(i);
            shuffled.append(d.features.row(i), d.labels[s], d.sequence_ids[s], d.walk_types[s], {d.start_frames[s]});
        }
        const auto queries = random_dataset(rng, 40, 3, 2);
        const KnnClassifier a(d, 5), b(shuffled, 5);
        for (Index q = 0; q < queries.size(); ++q)
            EXPECT_EQ(a.predict(queries.features.row(q)), b.predict(queries.features.row(q)));
    }
}

TEST(KnnPredict, ScaleInvariant) {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> g(0.0, 1.0);
    auto d = random_dataset(rng, 80, 6, 4);
    for (Index r = 0; r < d.size(); ++r)
        for (Index c = 0; c < d.dimension(); ++c)
            d.features(r, c) += 0.1 * g(rng);
    LabeledDataset scaled = d;
    scaled.features *= 3.7;
    const auto queries = random_dataset(rng, 200, 6, 4);
    const KnnClassifier a(d, 7), b(scaled, 7);
    for (Index q = 0; q < queries.size(); ++q) {
        const Eigen::RowVectorXd x = queries.features.row(q);
        EXPECT_EQ(a.predict(x), b.predict(3.7 * x));
    }
}

TEST(KnnPredict, Deterministic) {
    std::mt19937_64 rng(34);
    const auto d = random_dataset(rng, 40, 3, 2);
    const auto queries = random_dataset(rng, 40, 3, 2);
    for (Index q = 0; q < queries.size(); ++q)
        EXPECT_EQ(knn_predict(queries.features.row(q), d, 5), knn_predict(queries.features.row(q), d, 5));
}
