#include "lidargait/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "lidargait/errors.hpp"
#include "lidargait/parallel.hpp"

namespace lidargait {

namespace {

double unit_interval(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Index subject_index(const std::vector<std::string>& subjects, const std::string& label) {
    const auto it = std::lower_bound(subjects.begin(), subjects.end(), label);
    return static_cast<Index>(it - subjects.begin());
}

} // namespace

bool SplitAssignment::is_train(const std::string& id) const {
    return std::binary_search(train_ids.begin(), train_ids.end(), id);
}

bool SplitAssignment::is_test(const std::string& id) const {
    return std::binary_search(test_ids.begin(), test_ids.end(), id);
}

std::uint64_t split_hash(std::uint64_t seed, const std::string& key) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 1099511628211ULL;
    };
    for (int b = 0; b < 8; ++b)
        mix(static_cast<unsigned char>(seed >> (8 * b)));
    for (unsigned char c : key)
        mix(c);
    return h;
}

SplitAssignment assign_split(const std::vector<SequenceInfo>& sequences, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) && spec.mode != SplitMode::Identity)
        throw ValidationError("train_fraction must lie strictly between 0 and 1");
    SplitAssignment out;
    out.spec = spec;

    switch (spec.mode) {
    case SplitMode::Identity:
        for (const auto& s : sequences) {
            out.train_ids.push_back(s.sequence_id);
            out.test_ids.push_back(s.sequence_id);
        }
        break;
    case SplitMode::Random: {
        std::vector<std::pair<double, std::string>> draws;
        for (const auto& s : sequences)
            draws.emplace_back(unit_interval(split_hash(spec.seed, s.sequence_id)), s.sequence_id);
        std::sort(draws.begin(), draws.end());
        for (const auto& [u, id] : draws)
            (u < spec.train_fraction ? out.train_ids : out.test_ids).push_back(id);
        if (out.test_ids.empty() && draws.size() > 1) {
            out.test_ids.push_back(out.train_ids.back());
            out.train_ids.pop_back();
        }
        if (out.train_ids.empty() && draws.size() > 1) {
            out.train_ids.push_back(out.test_ids.front());
            out.test_ids.erase(out.test_ids.begin());
        }
        break;
    }
    case SplitMode::CrossWalk: {
        std::map<std::string, std::map<std::string, std::vector<std::string>>> by_subject;
        for (const auto& s : sequences)
            by_subject[s.subject][s.walk].push_back(s.sequence_id);
        const double target = 1.0 - spec.train_fraction;
        for (const auto& [subject, walks] : by_subject) {
            std::size_t total = 0;
            for (const auto& [walk, ids] : walks)
                total += ids.size();
            if (walks.size() < 2) {
                out.notes.push_back("subject '" + subject + "' has a single walk type; all its sequences train");
                for (const auto& [walk, ids] : walks)
                    out.train_ids.insert(out.train_ids.end(), ids.begin(), ids.end());
                continue;
            }
            const std::string* chosen = nullptr;
            double best_gap = 0.0;
            std::uint64_t best_hash = 0;
            for (const auto& [walk, ids] : walks) {
                const double gap = std::abs(static_cast<double>(ids.size()) / static_cast<double>(total) - target);
                const std::uint64_t h = split_hash(spec.seed, subject + "/" + walk);
                const bool tie = chosen && std::abs(gap - best_gap) < 1e-9;
                if (!chosen || (!tie && gap < best_gap) || (tie && h < best_hash)) {
                    chosen = &walk;
                    best_gap = gap;
                    best_hash = h;
                }
            }
            out.held_out_walks[subject].push_back(*chosen);
            for (const auto& [walk, ids] : walks) {
                auto& side = walk == *chosen ? out.test_ids : out.train_ids;
                side.insert(side.end(), ids.begin(), ids.end());
            }
        }
        break;
    }
    }
    std::sort(out.train_ids.begin(), out.train_ids.end());
    std::sort(out.test_ids.begin(), out.test_ids.end());
    return out;
}

LevelScores score_confusion(const Eigen::MatrixXi& confusion, const std::vector<std::string>& subjects,
                            FAverage average, F1Classes classes) {
    LevelScores s;
    s.confusion = confusion;
    s.total = confusion.sum();
    s.correct = confusion.trace();
    s.accuracy = s.total > 0 ? static_cast<double>(s.correct) / static_cast<double>(s.total) : 0.0;

    double f_sum = 0.0;
    int f_count = 0;
    for (Index c = 0; c < confusion.rows(); ++c) {
        const long tp = confusion(c, c);
        const long truth = confusion.row(c).sum();
        const long predicted = confusion.col(c).sum();
        ClassScore cs;
        cs.label = subjects[static_cast<std::size_t>(c)];
        cs.support = truth;
        cs.precision = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        cs.recall = truth > 0 ? static_cast<double>(tp) / static_cast<double>(truth) : 0.0;
        cs.f1 = cs.precision + cs.recall > 0.0 ? 2.0 * cs.precision * cs.recall / (cs.precision + cs.recall) : 0.0;
        if (classes == F1Classes::All || truth > 0 || predicted > 0) {
            f_sum += cs.f1;
            ++f_count;
        }
        s.classes.push_back(cs);
    }
    if (average == FAverage::Micro)
        s.f_score = s.accuracy; // single-label multi-class: micro P = micro R = accuracy
    else
        s.f_score = f_count > 0 ? f_sum / f_count : 0.0;
    return s;
}

EvalReport evaluate(const LabeledDataset& dataset, const SplitAssignment& split, const EvalOptions& opts) {
    dataset.validate();
    EvalReport report;
    report.k = opts.k;
    report.metric = to_string(opts.metric);
    report.f_average = to_string(opts.average);
    report.split = split;

    const LabeledDataset train = dataset.filter([&](const std::string& id) { return split.is_train(id); });
    const LabeledDataset test = dataset.filter([&](const std::string& id) { return split.is_test(id); });
    if (test.size() == 0)
        throw ValidationError("evaluation: test split has no windows");
    if (train.size() == 0)
        throw ValidationError("evaluation: training split has no windows");

    std::set<std::string> subject_set(dataset.labels.begin(), dataset.labels.end());
    report.subjects.assign(subject_set.begin(), subject_set.end());
    const std::set<std::string> trained(train.labels.begin(), train.labels.end());
    for (const auto& s : std::set<std::string>(test.labels.begin(), test.labels.end()))
        if (!trained.count(s))
            report.untrained_subjects.push_back(s);

    const KnnClassifier knn(train, opts.k, opts.metric);
    report.warnings = knn.warnings();

    std::vector<std::string> predicted(static_cast<std::size_t>(test.size()));
    parallel_for(predicted.size(), opts.jobs,
                 [&](std::size_t i) { predicted[i] = knn.predict(test.features.row(static_cast<Index>(i))); });

    const auto n_subjects = static_cast<Index>(report.subjects.size());
    Eigen::MatrixXi window_confusion = Eigen::MatrixXi::Zero(n_subjects, n_subjects);
    std::map<std::string, std::map<std::string, long>> seq_votes;
    std::map<std::string, std::string> seq_truth;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        window_confusion(subject_index(report.subjects, test.labels[i]),
                         subject_index(report.subjects, predicted[i])) += 1;
        ++seq_votes[test.sequence_ids[i]][predicted[i]];
        seq_truth[test.sequence_ids[i]] = test.labels[i];
    }
    report.window_level = score_confusion(window_confusion, report.subjects, opts.average, opts.classes);

    Eigen::MatrixXi seq_confusion = Eigen::MatrixXi::Zero(n_subjects, n_subjects);
    for (const auto& id : split.test_ids) {
        const auto it = seq_votes.find(id);
        if (it == seq_votes.end()) {
            report.warnings.push_back("test sequence '" + id + "' has no windows and is not scored");
            continue;
        }
        SequencePrediction sp;
        sp.sequence_id = id;
        sp.truth = seq_truth[id];
        for (const auto& [label, count] : it->second) {
            sp.windows += count;
            if (count > sp.votes_for_predicted) {
                sp.votes_for_predicted = count;
                sp.predicted = label;
            }
        }
        seq_confusion(subject_index(report.subjects, sp.truth), subject_index(report.subjects, sp.predicted)) += 1;
        report.sequences.push_back(sp);
    }
    report.sequence_level = score_confusion(seq_confusion, report.subjects, opts.average, opts.classes);
    return report;
}

SplitMode split_mode_from_string(const std::string& name) {
    if (name == "cross-walk")
        return SplitMode::CrossWalk;
    if (name == "random")
        return SplitMode::Random;
    if (name == "identity")
        return SplitMode::Identity;
    throw ValidationError("unknown split '" + name + "' (expected cross-walk, random or identity)");
}

std::string to_string(SplitMode mode) {
    switch (mode) {
    case SplitMode::CrossWalk:
        return "cross-walk";
    case SplitMode::Random:
        return "random";
    case SplitMode::Identity:
        return "identity";
    }
    return {};
}

FAverage f_average_from_string(const std::string& name) {
    if (name == "macro")
        return FAverage::Macro;
    if (name == "micro")
        return FAverage::Micro;
    throw ValidationError("unknown f-score average '" + name + "' (expected macro or micro)");
}

std::string to_string(FAverage average) {
    return average == FAverage::Macro ? "macro" : "micro";
}

F1Classes f1_classes_from_string(const std::string& name) {
    if (name == "present")
        return F1Classes::Present;
    if (name == "all")
        return F1Classes::All;
    throw ValidationError("unknown f1 class set '" + name + "' (expected present or all)");
}

std::string to_string(F1Classes classes) {
    return classes == F1Classes::Present ? "present" : "all";
}

std::string format_report_table(const EvalReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "features=" << r.feature_scheme << " repaired=" << (r.repaired ? "yes" : "no") << " window=" << r.window
       << " k=" << r.k << " split=" << to_string(r.split.spec.mode) << " seed=" << r.split.spec.seed << '\n';
    os << "                 accuracy   " << r.f_average << "-F1   correct/total\n";
    os << "  window-level   " << std::setw(7) << 100.0 * r.window_level.accuracy << "%  " << std::setw(7)
       << 100.0 * r.window_level.f_score << "%   " << r.window_level.correct << '/' << r.window_level.total << '\n';
    os << "  sequence-level " << std::setw(7) << 100.0 * r.sequence_level.accuracy << "%  " << std::setw(7)
       << 100.0 * r.sequence_level.f_score << "%   " << r.sequence_level.correct << '/' << r.sequence_level.total
       << '\n';
    for (const auto& s : r.sequences)
        os << "    " << s.sequence_id << ": truth " << s.truth << ", predicted " << s.predicted << " ("
           << s.votes_for_predicted << '/' << s.windows << " windows)\n";
    if (!r.untrained_subjects.empty()) {
        os << "  subjects absent from training:";
        for (const auto& s : r.untrained_subjects)
            os << ' ' << s;
        os << '\n';
    }
    return os.str();
}

} // namespace lidargait
