#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lidargait/features.hpp"

namespace lidargait {

enum class Metric { Manhattan };

Metric metric_from_string(const std::string& name);
std::string to_string(Metric metric);

/// L1 distance between two equally sized vectors.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar manhattan_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return (a - b).cwiseAbs().sum();
}

/// Window features with their labels; every row has the same width.
struct LabeledDataset {
    FeatureMatrix features;
    std::vector<std::string> labels;
    std::vector<std::string> sequence_ids;
    std::vector<std::string> walk_types;
    std::vector<Index> start_frames;

    Index size() const { return features.rows(); }
    Index dimension() const { return features.cols(); }

    /// Appends rows sharing one label / sequence. Throws ValidationError on a width mismatch.
    void append(const FeatureMatrix& rows, const std::string& label, const std::string& sequence_id,
                const std::string& walk_type, const std::vector<Index>& starts = {});

    /// Rows whose sequence id satisfies `keep`.
    template <typename Pred>
    LabeledDataset filter(Pred keep) const {
        std::vector<Index> rows;
        for (Index i = 0; i < size(); ++i)
            if (keep(sequence_ids[static_cast<std::size_t>(i)]))
                rows.push_back(i);
        LabeledDataset out;
        out.features.resize(static_cast<Index>(rows.size()), dimension());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto i = static_cast<std::size_t>(rows[r]);
            out.features.row(static_cast<Index>(r)) = features.row(rows[r]);
            out.labels.push_back(labels[i]);
            out.sequence_ids.push_back(sequence_ids[i]);
            out.walk_types.push_back(walk_types[i]);
            out.start_frames.push_back(start_frames[i]);
        }
        return out;
    }

    void validate() const;
};

struct Neighbor {
    Index index = 0;
    double distance = 0.0;
};

/// k-nearest-neighbour vote over a fixed training set.
///
/// Distance ties go to the training row that sorts first canonically (feature values lexicographically,
/// then label, sequence id, walk type, start frame), so predictions do not depend on row order. Label ties
/// go to the smaller summed neighbour distance, then to the lexicographically smaller label.
/// The classifier keeps a reference to `train`, which must outlive it.
class KnnClassifier {
public:
    KnnClassifier(const LabeledDataset& train, int k, Metric metric = Metric::Manhattan);

    std::vector<Neighbor> nearest(const Eigen::Ref<const Eigen::RowVectorXd>& query) const;
    std::string predict(const Eigen::Ref<const Eigen::RowVectorXd>& query) const;

    int k() const { return m_k; }
    const std::vector<std::string>& warnings() const { return m_warnings; }

private:
    const LabeledDataset& m_train;
    int m_k;
    Metric m_metric;
    std::vector<Index> m_rank;
    std::vector<std::string> m_warnings;
};

/// One-shot prediction. `k` larger than the training set is clamped (warning appended when requested).
std::string knn_predict(const Eigen::Ref<const Eigen::RowVectorXd>& query, const LabeledDataset& train, int k,
                        Metric metric = Metric::Manhattan, std::vector<std::string>* warnings = nullptr);

} // namespace lidargait
