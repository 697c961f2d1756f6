#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lidargait/knn.hpp"

namespace lidargait {

/// CrossWalk holds out, per subject, whole walk types; Random splits sequences by a seeded hash;
/// Identity tests on the training set itself.
enum class SplitMode { CrossWalk, Random, Identity };

struct SplitSpec {
    SplitMode mode = SplitMode::CrossWalk;
    double train_fraction = 0.7;
    std::uint64_t seed = 1;
};

struct SequenceInfo {
    std::string sequence_id;
    std::string subject;
    std::string walk;
};

struct SplitAssignment {
    SplitSpec spec;
    std::vector<std::string> train_ids; ///< sorted
    std::vector<std::string> test_ids;  ///< sorted
    std::map<std::string, std::vector<std::string>> held_out_walks;
    std::vector<std::string> notes;

    bool is_train(const std::string& id) const;
    bool is_test(const std::string& id) const;
};

/// Seeded 64-bit FNV-1a over the seed bytes followed by the key.
std::uint64_t split_hash(std::uint64_t seed, const std::string& key);

/// Deterministic train/test assignment.
///
/// CrossWalk: for each subject the walk type whose share of that subject's sequences is closest to
/// 1 - train_fraction goes to test (ties broken by hash order); subjects with one walk type stay in training.
SplitAssignment assign_split(const std::vector<SequenceInfo>& sequences, const SplitSpec& spec);

enum class FAverage { Macro, Micro };
/// Which classes enter the F-score average: those seen in truth or predictions, or every dataset subject.
enum class F1Classes { Present, All };

struct EvalOptions {
    int k = 7;
    Metric metric = Metric::Manhattan;
    FAverage average = FAverage::Macro;
    F1Classes classes = F1Classes::Present;
    int jobs = 1;
};

struct ClassScore {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;
};

struct SequencePrediction {
    std::string sequence_id;
    std::string truth;
    std::string predicted;
    long windows = 0;
    long votes_for_predicted = 0;
};

struct LevelScores {
    Eigen::MatrixXi confusion; ///< rows truth, columns prediction, both in `EvalReport::subjects` order
    long total = 0;
    long correct = 0;
    double accuracy = 0.0;
    double f_score = 0.0;
    std::vector<ClassScore> classes;
};

struct EvalReport {
    int k = 7;
    std::string metric = "manhattan";
    std::string f_average = "macro";
    SplitAssignment split;
    int window = 1;
    std::string cycle_mode;
    std::string feature_scheme;
    bool repaired = true;
    std::vector<std::string> subjects;
    LevelScores window_level;
    LevelScores sequence_level;
    std::vector<SequencePrediction> sequences;
    std::vector<std::string> untrained_subjects;
    std::vector<std::string> warnings;
};

/// Scores from a confusion matrix. Empty classes score F1 = 0.
LevelScores score_confusion(const Eigen::MatrixXi& confusion, const std::vector<std::string>& subjects,
                            FAverage average, F1Classes classes);

/// Window-level KNN predictions on the test sequences, majority vote per sequence (ties: smaller label).
/// Throws ValidationError when either side of the split is empty.
EvalReport evaluate(const LabeledDataset& dataset, const SplitAssignment& split, const EvalOptions& opts);

SplitMode split_mode_from_string(const std::string& name);
std::string to_string(SplitMode mode);
FAverage f_average_from_string(const std::string& name);
std::string to_string(FAverage average);
F1Classes f1_classes_from_string(const std::string& name);
std::string to_string(F1Classes classes);

/// Plain-text summary table.
std::string format_report_table(const EvalReport& report);

} // namespace lidargait
