#include "lidargait/knn.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "lidargait/errors.hpp"

namespace lidargait {

Metric metric_from_string(const std::string& name) {
    if (name == "manhattan")
        return Metric::Manhattan;
    throw ValidationError("unknown metric '" + name + "' (only manhattan is supported)");
}

std::string to_string(Metric) {
    return "manhattan";
}

void LabeledDataset::append(const FeatureMatrix& rows, const std::string& label, const std::string& sequence_id,
                            const std::string& walk_type, const std::vector<Index>& starts) {
    if (rows.rows() == 0)
        return;
    if (size() > 0 && rows.cols() != dimension())
        throw ValidationError("window width " + std::to_string(rows.cols()) + " of sequence '" + sequence_id +
                              "' does not match dataset width " + std::to_string(dimension()));
    const Index old = size();
    FeatureMatrix grown(old + rows.rows(), rows.cols());
    if (old > 0)
        grown.topRows(old) = features;
    grown.bottomRows(rows.rows()) = rows;
    features = std::move(grown);
    for (Index r = 0; r < rows.rows(); ++r) {
        labels.push_back(label);
        sequence_ids.push_back(sequence_id);
        walk_types.push_back(walk_type);
        start_frames.push_back(starts.empty() ? r : starts[static_cast<std::size_t>(r)]);
    }
}

void LabeledDataset::validate() const {
    const auto n = static_cast<std::size_t>(size());
    if (labels.size() != n || sequence_ids.size() != n || walk_types.size() != n || start_frames.size() != n)
        throw ValidationError("labeled dataset columns disagree in length");
}

KnnClassifier::KnnClassifier(const LabeledDataset& train, int k, Metric metric)
    : m_train(train), m_k(k), m_metric(metric) {
    train.validate();
    if (train.size() == 0)
        throw ValidationError("knn: training set is empty");
    if (k < 1)
        throw ValidationError("knn: k must be positive");
    if (k > train.size()) {
        m_k = static_cast<int>(train.size());
        m_warnings.push_back("k=" + std::to_string(k) + " exceeds training size; clamped to " + std::to_string(m_k));
    }

    std::vector<Index> order(static_cast<std::size_t>(train.size()));
    std::iota(order.begin(), order.end(), Index{0});
    const auto& f = train.features;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const auto fa = f.row(a);
        const auto fb = f.row(b);
        if (std::lexicographical_compare(fa.begin(), fa.end(), fb.begin(), fb.end()))
            return true;
        if (std::lexicographical_compare(fb.begin(), fb.end(), fa.begin(), fa.end()))
            return false;
        const auto sa = static_cast<std::size_t>(a);
        const auto sb = static_cast<std::size_t>(b);
        return std::tie(train.labels[sa], train.sequence_ids[sa], train.walk_types[sa], train.start_frames[sa]) <
               std::tie(train.labels[sb], train.sequence_ids[sb], train.walk_types[sb], train.start_frames[sb]);
    });
    m_rank.resize(order.size());
    for (std::size_t r = 0; r < order.size(); ++r)
        m_rank[static_cast<std::size_t>(order[r])] = static_cast<Index>(r);
}

std::vector<Neighbor> KnnClassifier::nearest(const Eigen::Ref<const Eigen::RowVectorXd>& query) const {
    if (query.size() != m_train.dimension())
        throw ValidationError("knn: query width " + std::to_string(query.size()) + " does not match training width " +
                              std::to_string(m_train.dimension()));
    std::vector<Neighbor> all(static_cast<std::size_t>(m_train.size()));
    for (Index i = 0; i < m_train.size(); ++i)
        all[static_cast<std::size_t>(i)] = Neighbor{i, manhattan_distance(m_train.features.row(i), query)};
    const auto closer = [this](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance)
            return a.distance < b.distance;
        return m_rank[static_cast<std::size_t>(a.index)] < m_rank[static_cast<std::size_t>(b.index)];
    };
    std::partial_sort(all.begin(), all.begin() + m_k, all.end(), closer);
    all.resize(static_cast<std::size_t>(m_k));
    return all;
}

std::string KnnClassifier::predict(const Eigen::Ref<const Eigen::RowVectorXd>& query) const {
    struct Vote {
        int count = 0;
        double distance = 0.0;
    };
    std::map<std::string, Vote> votes;
    for (const auto& nb : nearest(query)) {
        auto& v = votes[m_train.labels[static_cast<std::size_t>(nb.index)]];
        ++v.count;
        v.distance += nb.distance;
    }
    // map iteration is lexicographic, so strict comparisons keep the smaller label on a full tie
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second.count > best->second.count ||
            (it->second.count == best->second.count && it->second.distance < best->second.distance))
            best = it;
    }
    return best->first;
}

std::string knn_predict(const Eigen::Ref<const Eigen::RowVectorXd>& query, const LabeledDataset& train, int k,
                        Metric metric, std::vector<std::string>* warnings) {
    KnnClassifier knn(train, k, metric);
    if (warnings)
        warnings->insert(warnings->end(), knn.warnings().begin(), knn.warnings().end());
    return knn.predict(query);
}

} // namespace lidargait
