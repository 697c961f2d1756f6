#include "lidargait/report_json.hpp"

#include <cmath>
#include <fstream>

#include "lidargait/errors.hpp"

namespace lidargait {

namespace {

Json finite_or_null(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json matrix_json(const Eigen::MatrixXi& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

Json to_json(const TrackRepairReport& r) {
    Json j;
    j["joint"] = std::string(joint_name(r.joint));
    j["axis"] = std::string(1, axis_name(r.axis));
    j["length"] = r.length;
    j["missing_corrections"] = r.missing_corrections;
    j["jump_corrections"] = r.jump_corrections;
    j["backfilled"] = r.backfilled;
    j["uncorrectable"] = r.uncorrectable;
    j["threshold"] = finite_or_null(r.threshold);
    j["warnings"] = r.warnings;
    return j;
}

Json to_json(const RepairReport& r) {
    Json j;
    j["missing_corrections"] = r.missing_corrections;
    j["jump_corrections"] = r.jump_corrections;
    j["backfilled"] = r.backfilled;
    j["uncorrectable"] = r.uncorrectable;
    j["warnings"] = r.warnings;
    Json tracks = Json::array();
    for (const auto& t : r.tracks)
        tracks.push_back(to_json(t));
    j["tracks"] = std::move(tracks);
    return j;
}

Json to_json(const CycleEstimate& e) {
    Json j;
    j["cycle_frames"] = e.cycle_frames;
    j["fallback"] = e.fallback;
    j["peaks"] = e.peaks;
    j["candidate_cycles"] = e.candidate_cycles;
    j["trimmed_cycles"] = e.trimmed_cycles;
    j["warnings"] = e.warnings;
    return j;
}

Json to_json(const LevelScores& s, const std::vector<std::string>& subjects) {
    Json j;
    j["total"] = s.total;
    j["correct"] = s.correct;
    j["accuracy"] = s.accuracy;
    j["f_score"] = s.f_score;
    j["labels"] = subjects;
    j["confusion"] = matrix_json(s.confusion);
    Json classes = Json::array();
    for (const auto& c : s.classes)
        classes.push_back(
            {{"label", c.label}, {"support", c.support}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}});
    j["classes"] = std::move(classes);
    return j;
}

Json to_json(const EvalReport& r) {
    Json j;
    j["format"] = "lidargait eval-report v1";
    j["classifier"] = {{"k", r.k}, {"metric", r.metric}, {"f_average", r.f_average}};
    j["features"] = {{"scheme", r.feature_scheme}, {"repaired", r.repaired}, {"window", r.window},
                     {"cycle_mode", r.cycle_mode}};
    Json held_out = Json::object();
    for (const auto& [subject, walks] : r.split.held_out_walks)
        held_out[subject] = walks;
    j["split"] = {{"mode", to_string(r.split.spec.mode)},
                  {"train_fraction", r.split.spec.train_fraction},
                  {"seed", r.split.spec.seed},
                  {"train", r.split.train_ids},
                  {"test", r.split.test_ids},
                  {"held_out_walks", std::move(held_out)},
                  {"notes", r.split.notes}};
    j["subjects"] = r.subjects;
    j["window_level"] = to_json(r.window_level, r.subjects);
    j["sequence_level"] = to_json(r.sequence_level, r.subjects);
    Json seqs = Json::array();
    for (const auto& s : r.sequences)
        seqs.push_back({{"sequence", s.sequence_id},
                        {"truth", s.truth},
                        {"predicted", s.predicted},
                        {"windows", s.windows},
                        {"votes", s.votes_for_predicted}});
    j["sequences"] = std::move(seqs);
    j["untrained_subjects"] = r.untrained_subjects;
    j["warnings"] = r.warnings;
    return j;
}

Json repair_summary_json(const std::map<std::string, RepairReport>& reports) {
    Json j;
    j["format"] = "lidargait repair-report v1";
    Index missing = 0, jumps = 0, backfilled = 0, uncorrectable = 0;
    Json per = Json::object();
    for (const auto& [id, r] : reports) {
        missing += r.missing_corrections;
        jumps += r.jump_corrections;
        backfilled += r.backfilled;
        uncorrectable += r.uncorrectable;
        per[id] = to_json(r);
    }
    j["totals"] = {{"missing_corrections", missing},
                   {"jump_corrections", jumps},
                   {"backfilled", backfilled},
                   {"uncorrectable", uncorrectable}};
    j["sequences"] = std::move(per);
    return j;
}

std::string dump_json(const Json& json) {
    return json.dump(2) + "\n";
}

void save_json(const std::filesystem::path& path, const Json& json) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write " + path.string());
    out << dump_json(json);
}

} // namespace lidargait
