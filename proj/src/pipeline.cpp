#include "lidargait/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "lidargait/errors.hpp"
#include "lidargait/parallel.hpp"
#include "lidargait/projection.hpp"
#include "lidargait/report_json.hpp"
#include "lidargait/sequence_io.hpp"
#include "lidargait/svg.hpp"

namespace lidargait {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const InputNotFound&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

void require_population(const std::vector<WorldSkeletonSequence>& world) {
    std::map<std::string, int> per_subject;
    std::set<std::string> ids;
    for (const auto& s : world) {
        ++per_subject[s.subject_label];
        if (!ids.insert(s.sequence_id).second)
            throw ValidationError("sequence id '" + s.sequence_id + "' appears twice");
    }
    int eligible = 0;
    for (const auto& [subject, count] : per_subject)
        eligible += count >= 2;
    if (per_subject.size() < 2 || eligible < 2)
        throw ValidationError("need at least 2 subjects with 2 sequences each, found " +
                              std::to_string(world.size()) + " sequences of " + std::to_string(per_subject.size()) +
                              " subjects");
}

std::vector<SequenceInfo> sequence_infos(const std::vector<WorldSkeletonSequence>& seqs) {
    std::vector<SequenceInfo> out;
    for (const auto& s : seqs)
        out.push_back({s.sequence_id, s.subject_label, s.walk_type});
    return out;
}

/// Scores test sequences that use different windows: each group is classified against training windows
/// rebuilt at that group's width, and the confusion counts are merged.
EvalReport evaluate_grouped(const std::vector<SequenceFeatures>& features, const std::map<std::string, int>& windows,
                            const SplitAssignment& split, const EvalOptions& opts, int stride) {
    std::map<int, std::vector<std::string>> groups;
    for (const auto& id : split.test_ids)
        groups[windows.at(id)].push_back(id);

    std::set<std::string> all_subjects;
    for (const auto& f : features)
        all_subjects.insert(f.subject_label);
    const std::vector<std::string> subjects(all_subjects.begin(), all_subjects.end());
    auto where = [&](const std::string& s) {
        return static_cast<Index>(std::lower_bound(subjects.begin(), subjects.end(), s) - subjects.begin());
    };

    EvalReport merged;
    merged.subjects = subjects;
    merged.split = split;
    const auto n = static_cast<Index>(subjects.size());
    Eigen::MatrixXi window_conf = Eigen::MatrixXi::Zero(n, n);
    Eigen::MatrixXi seq_conf = Eigen::MatrixXi::Zero(n, n);
    std::set<std::string> untrained;
    for (const auto& [width, ids] : groups) {
        std::map<std::string, int> at_width;
        for (const auto& f : features)
            at_width[f.sequence_id] = width;
        SplitAssignment sub = split;
        sub.test_ids = ids;
        std::vector<std::string> warnings;
        const LabeledDataset data = build_dataset(features, at_width, stride, &warnings);
        EvalReport part = evaluate(data, sub, opts);
        for (Index r = 0; r < part.window_level.confusion.rows(); ++r)
            for (Index c = 0; c < part.window_level.confusion.cols(); ++c) {
                const Index gr = where(part.subjects[static_cast<std::size_t>(r)]);
                const Index gc = where(part.subjects[static_cast<std::size_t>(c)]);
                window_conf(gr, gc) += part.window_level.confusion(r, c);
                seq_conf(gr, gc) += part.sequence_level.confusion(r, c);
            }
        merged.sequences.insert(merged.sequences.end(), part.sequences.begin(), part.sequences.end());
        untrained.insert(part.untrained_subjects.begin(), part.untrained_subjects.end());
        for (auto& w : warnings)
            merged.warnings.push_back("window " + std::to_string(width) + ": " + w);
        for (auto& w : part.warnings)
            merged.warnings.push_back("window " + std::to_string(width) + ": " + w);
        merged.k = part.k;
        merged.metric = part.metric;
        merged.f_average = part.f_average;
    }
    std::sort(merged.sequences.begin(), merged.sequences.end(),
              [](const SequencePrediction& a, const SequencePrediction& b) { return a.sequence_id < b.sequence_id; });
    merged.untrained_subjects.assign(untrained.begin(), untrained.end());
    merged.window_level = score_confusion(window_conf, subjects, opts.average, opts.classes);
    merged.sequence_level = score_confusion(seq_conf, subjects, opts.average, opts.classes);
    return merged;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write " + path.string());
    out << text;
}

} // namespace

std::vector<RawSequence> ingest_directory(const fs::path& dir, int jobs) {
    if (!fs::is_directory(dir))
        throw InputNotFound("input directory '" + dir.string() + "' does not exist");
    const auto files = list_sequence_files(dir);
    if (files.empty())
        throw ValidationError("no .jsonl or .csv sequence files in " + dir.string());
    std::vector<RawSequence> out(files.size());
    parallel_for(files.size(), jobs, [&](std::size_t i) {
        try {
            out[i] = load_sequence(files[i]);
        } catch (const std::exception& e) {
            throw ValidationError(files[i].filename().string() + ": " + e.what());
        }
    });
    return out;
}

std::vector<WorldSkeletonSequence> project_sequences(const std::vector<RawSequence>& raw, const CameraParams& cam,
                                                     int jobs) {
    std::vector<WorldSkeletonSequence> out(raw.size());
    parallel_for(raw.size(), jobs, [&](std::size_t i) { out[i] = to_world_sequence(raw[i], cam); });
    return out;
}

LabeledDataset build_dataset(const std::vector<SequenceFeatures>& features, const std::map<std::string, int>& windows,
                             int stride, std::vector<std::string>* warnings) {
    LabeledDataset data;
    for (const auto& f : features) {
        WindowSet w = concatenate_features(f.values, windows.at(f.sequence_id), stride);
        if (warnings)
            for (const auto& msg : w.warnings)
                warnings->push_back(f.sequence_id + ": " + msg);
        data.append(w.values, f.subject_label, f.sequence_id, f.walk_type, w.start_frames);
    }
    return data;
}

EvalReport train_eval(const std::vector<SequenceFeatures>& features, const std::map<std::string, int>& windows,
                      int shared_window, const SplitAssignment& split, const PipelineConfig& cfg) {
    EvalOptions opts;
    opts.k = cfg.classifier.k;
    opts.metric = cfg.classifier.metric;
    opts.average = cfg.classifier.average;
    opts.classes = cfg.classifier.classes;
    opts.jobs = cfg.jobs;
    EvalReport report;
    if (shared_window > 0) {
        std::vector<std::string> warnings;
        const LabeledDataset data = build_dataset(features, windows, cfg.cycle.stride, &warnings);
        report = evaluate(data, split, opts);
        report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    } else {
        report = evaluate_grouped(features, windows, split, opts, cfg.cycle.stride);
    }
    report.window = shared_window;
    report.feature_scheme = features.empty() ? to_string(cfg.classifier.scheme) : to_string(features.front().scheme);
    return report;
}

CycleStage cycle_stage(const std::vector<WorldSkeletonSequence>& repaired, const SplitAssignment& split,
                       const PipelineConfig& cfg) {
    CycleStage out;
    out.mode = cfg.window ? "override" : to_string(cfg.cycle.mode);
    std::vector<CycleEstimate> estimates(repaired.size());
    parallel_for(repaired.size(), cfg.jobs,
                 [&](std::size_t i) { estimates[i] = estimate_cycle(ankle_distance(repaired[i]), cfg.cycle); });
    std::vector<CycleEstimate> training;
    for (std::size_t i = 0; i < repaired.size(); ++i) {
        const auto& id = repaired[i].sequence_id;
        if (split.is_train(id))
            training.push_back(estimates[i]);
        out.cycles[id] = estimates[i];
    }
    if (cfg.window)
        out.window = *cfg.window;
    else if (cfg.cycle.mode == CycleMode::Global)
        out.window = vote_global_cycle(training.empty() ? estimates : training);
    else if (cfg.cycle.mode == CycleMode::Fixed)
        out.window = cfg.cycle.fixed_window;
    else
        out.window = 0;
    for (const auto& [id, est] : out.cycles)
        out.windows[id] = out.window > 0 ? out.window : est.cycle_frames;
    return out;
}

Json cycles_json(const CycleStage& stage, const SplitAssignment& split, const PipelineConfig& cfg) {
    Json cycles;
    cycles["format"] = "lidargait cycles v1";
    cycles["mode"] = stage.mode;
    cycles["window"] = stage.window;
    cycles["repaired"] = !cfg.skip_repair;
    Json per = Json::object();
    for (const auto& [id, est] : stage.cycles) {
        Json j = to_json(est);
        j["window"] = stage.windows.at(id);
        j["train"] = split.is_train(id);
        per[id] = std::move(j);
    }
    cycles["sequences"] = std::move(per);
    return cycles;
}

CycleStage cycle_stage_from_json(const Json& j) {
    CycleStage out;
    try {
        if (j.at("format") != "lidargait cycles v1")
            throw ValidationError("not a cycles artifact");
        out.mode = j.at("mode").get<std::string>();
        out.window = j.at("window").get<int>();
        for (const auto& [id, entry] : j.at("sequences").items()) {
            CycleEstimate est;
            est.cycle_frames = entry.at("cycle_frames").get<int>();
            est.fallback = entry.at("fallback").get<bool>();
            est.peaks = entry.at("peaks").get<std::vector<Index>>();
            est.candidate_cycles = entry.at("candidate_cycles").get<std::vector<int>>();
            est.trimmed_cycles = entry.at("trimmed_cycles").get<std::vector<int>>();
            est.warnings = entry.at("warnings").get<std::vector<std::string>>();
            out.cycles[id] = std::move(est);
            out.windows[id] = entry.at("window").get<int>();
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed cycles artifact: ") + e.what());
    }
    return out;
}

PipelineResult run_from_world(std::vector<WorldSkeletonSequence> world, const PipelineConfig& cfg) {
    cfg.validate();
    PipelineResult res;
    stage("ingest", [&] { require_population(world); });
    res.world = std::move(world);
    const std::size_t n = res.world.size();

    stage("repair", [&] {
        if (cfg.skip_repair) {
            res.repaired = res.world;
            return;
        }
        res.repaired.resize(n);
        std::vector<RepairReport> reports(n);
        parallel_for(n, cfg.jobs, [&](std::size_t i) {
            auto [seq, report] = repair_sequence(res.world[i], cfg.repair);
            res.repaired[i] = std::move(seq);
            reports[i] = std::move(report);
        });
        for (std::size_t i = 0; i < n; ++i)
            res.repair_reports[res.world[i].sequence_id] = std::move(reports[i]);
    });

    stage("features", [&] {
        res.features.resize(n);
        const auto policy = cfg.skip_repair ? MissingJoints::Allow : MissingJoints::Reject;
        parallel_for(n, cfg.jobs, [&](std::size_t i) {
            res.features[i] = extract_features(res.repaired[i], cfg.classifier.scheme, policy);
        });
    });

    stage("cycle", [&] {
        res.split = assign_split(sequence_infos(res.repaired), cfg.classifier.split);
        res.cycle_stage = cycle_stage(res.repaired, res.split, cfg);
    });

    stage("train-eval", [&] {
        res.report = train_eval(res.features, res.cycle_stage.windows, res.cycle_stage.window, res.split, cfg);
        res.report.cycle_mode = res.cycle_stage.mode;
        res.report.repaired = !cfg.skip_repair;
    });
    return res;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    const auto raw = stage("ingest", [&] { return ingest_directory(cfg.io.input_dir, cfg.jobs); });
    auto world = stage("project", [&] { return project_sequences(raw, cfg.camera, cfg.jobs); });
    PipelineResult res = run_from_world(std::move(world), cfg);
    stage("artifacts", [&] { write_artifacts(res, cfg); });
    return res;
}

void write_artifacts(const PipelineResult& res, const PipelineConfig& cfg) {
    const fs::path out = cfg.io.output_dir;
    fs::create_directories(out / "world");
    fs::create_directories(out / "features");
    for (const auto& s : res.world)
        save_world_csv(out / "world" / (s.sequence_id + ".csv"), s);
    if (!cfg.skip_repair) {
        fs::create_directories(out / "repaired");
        for (const auto& s : res.repaired)
            save_world_csv(out / "repaired" / (s.sequence_id + ".csv"), s);
        save_json(out / "repair_report.json", repair_summary_json(res.repair_reports));
    }
    for (const auto& f : res.features)
        save_features_csv(out / "features" / (f.sequence_id + ".csv"), f);

    save_json(out / "cycles.json", cycles_json(res.cycle_stage, res.split, cfg));

    save_json(out / "eval_report.json", to_json(res.report));
    write_text(out / "eval_report.txt", format_report_table(res.report));
    write_text(out / "config.toml", config_to_toml(cfg));
    write_text(out / "confusion.svg", confusion_svg("sequence-level confusion", res.report.subjects,
                                                    res.report.sequence_level.confusion));
}

std::vector<BaselineRow> baseline_suite(const std::vector<WorldSkeletonSequence>& world, const PipelineConfig& cfg) {
    std::vector<BaselineRow> rows;
    for (FeatureScheme scheme : {FeatureScheme::JointDistances, FeatureScheme::JointVectors}) {
        for (bool repaired : {false, true}) {
            PipelineConfig run = cfg;
            run.classifier.scheme = scheme;
            run.skip_repair = !repaired;
            rows.push_back({scheme, repaired, run_from_world(world, run).report});
        }
    }
    return rows;
}

std::string format_baseline_table(const std::vector<BaselineRow>& rows) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "features          repair   window   seq-acc   seq-F1   win-acc   win-F1\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(18) << to_string(r.scheme) << std::setw(9) << (r.repaired ? "on" : "off")
           << std::right << std::setw(6) << r.report.window << std::setw(9) << 100.0 * r.report.sequence_level.accuracy
           << '%' << std::setw(8) << 100.0 * r.report.sequence_level.f_score << '%' << std::setw(9)
           << 100.0 * r.report.window_level.accuracy << '%' << std::setw(8) << 100.0 * r.report.window_level.f_score
           << "%\n";
    }
    return os.str();
}

} // namespace lidargait
