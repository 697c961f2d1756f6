// lidargait command-line tool: synthetic data, joint repair, features, gait cycles, KNN evaluation.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lidargait/config.hpp"
#include "lidargait/errors.hpp"
#include "lidargait/pipeline.hpp"
#include "lidargait/projection.hpp"
#include "lidargait/report_json.hpp"
#include "lidargait/sequence_io.hpp"
#include "lidargait/svg.hpp"
#include "lidargait/synth.hpp"

namespace fs = std::filesystem;
using namespace lidargait;

namespace {

/// Command-line values that override the config file, applied after it is loaded.
class Overrides {
public:
    template <typename T, typename Apply>
    CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, Apply apply) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, help);
        m_items.push_back({opt, [value, apply](PipelineConfig& cfg) { apply(cfg, *value); }});
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& help,
                      std::function<void(PipelineConfig&)> apply) {
        CLI::Option* opt = app->add_flag(name, help);
        m_items.push_back({opt, std::move(apply)});
        return opt;
    }

    void apply(PipelineConfig& cfg) const {
        for (const auto& [opt, fn] : m_items)
            if (opt->count() > 0)
                fn(cfg);
    }

private:
    std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> m_items;
};

void require_path(const fs::path& p) {
    if (!fs::exists(p))
        throw InputNotFound("input '" + p.string() + "' does not exist");
}

/// A world-track CSV as is, or a detector file projected with the configured camera.
WorldSkeletonSequence load_world(const fs::path& path, const CameraParams& cam) {
    require_path(path);
    if (is_world_csv(path))
        return load_world_csv(path);
    return to_world_sequence(load_sequence(path), cam);
}

std::vector<fs::path> files_in(const fs::path& dir, const std::string& extension) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == extension)
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write " + path.string());
    out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint-track repair and gait recognition for low-resolution lidar skeletons"};
    app.set_version_flag("--version", std::string(LIDARGAIT_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "TOML configuration file")->check(CLI::ExistingFile);
    Overrides global;
    global.add<int>(&app, "--jobs", "Worker threads per stage", [](auto& c, int v) { c.jobs = v; });

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic walking dataset (JSONL + ground truth)");
    std::string synth_out;
    synth->add_option("--out", synth_out, "Output directory")->required();
    Overrides synth_over;
    synth_over.add<int>(synth, "--subjects", "Number of subjects", [](auto& c, int v) { c.synth.n_subjects = v; });
    synth_over.add<int>(synth, "--seqs-per-subject", "Sequences per subject",
                        [](auto& c, int v) { c.synth.seqs_per_subject = v; });
    synth_over.add<long>(synth, "--frames", "Frames per sequence", [](auto& c, long v) { c.synth.n_frames = v; });
    synth_over.add<std::uint64_t>(synth, "--seed", "Generator seed", [](auto& c, std::uint64_t v) { c.synth.seed = v; });
    synth_over.add<double>(synth, "--dropout", "Fraction of missing joint-frames",
                           [](auto& c, double v) { c.synth.corruption.dropout_rate = v; });
    synth_over.add<double>(synth, "--burst", "Mean dropout run length in frames",
                           [](auto& c, double v) { c.synth.corruption.burst_length = v; });
    synth_over.add<double>(synth, "--jump-rate", "Per joint-frame jump probability",
                           [](auto& c, double v) { c.synth.corruption.jump_rate = v; });
    synth_over.add<double>(synth, "--jump-scale", "Jump displacement in meters",
                           [](auto& c, double v) { c.synth.corruption.jump_scale = v; });
    synth_over.add<double>(synth, "--jitter", "Gaussian coordinate noise in meters",
                           [](auto& c, double v) { c.synth.corruption.jitter = v; });

    // repair
    auto* repair = app.add_subcommand("repair", "Median-correct and smooth one sequence");
    std::string repair_in, repair_out, repair_report, plot_path, plot_joint = "RAnkle", plot_axis = "z";
    repair->add_option("--in", repair_in, "Detector file (.jsonl/.csv) or world-track CSV")->required();
    repair->add_option("--out", repair_out, "Repaired world-track CSV")->required();
    repair->add_option("--report", repair_report, "Repair report JSON");
    repair->add_option("--plot", plot_path, "Before/after SVG of one joint track");
    repair->add_option("--plot-joint", plot_joint, "Joint for --plot")->capture_default_str();
    repair->add_option("--plot-axis", plot_axis, "Axis for --plot (x, y or z)")->capture_default_str();
    Overrides repair_over;
    repair_over.add<int>(repair, "--window-card", "Previous nonzero samples in the median",
                         [](auto& c, int v) { c.repair.window_card = v; });
    repair_over.add<int>(repair, "--lookback", "Frames searched backwards", [](auto& c, int v) { c.repair.lookback = v; });
    repair_over.add<int>(repair, "--span", "Smoothing span (odd)", [](auto& c, int v) { c.repair.smoothing_span = v; });
    repair_over.add<int>(repair, "--robust-iterations", "Robust reweighting rounds",
                         [](auto& c, int v) { c.repair.robust_iterations = v; });
    repair_over.add<std::string>(repair, "--threshold-mode", "relative or literal",
                                 [](auto& c, const std::string& v) { c.repair.threshold_mode = threshold_mode_from_string(v); });
    repair_over.add<double>(repair, "--jump-factor", "Multiplier on the jump threshold",
                            [](auto& c, double v) { c.repair.jump_factor = v; });
    repair_over.add<int>(repair, "--max-jump-run", "Consecutive jump corrections before accepting a level change",
                         [](auto& c, int v) { c.repair.max_jump_run = v; });

    // features
    auto* features = app.add_subcommand("features", "Per-frame inter-joint features of one sequence");
    std::string features_in, features_out;
    bool allow_missing = false;
    features->add_option("--in", features_in, "Repaired world-track CSV (or detector file)")->required();
    features->add_option("--out", features_out, "Features CSV")->required();
    features->add_flag("--allow-missing", allow_missing, "Keep zero coordinates of missing joints");
    Overrides features_over;
    features_over.add<std::string>(features, "--scheme", "joint-vectors, joint-distances or reference-vectors",
                                   [](auto& c, const std::string& v) { c.classifier.scheme = feature_scheme_from_string(v); });

    // cycle
    auto* cycle = app.add_subcommand("cycle", "Gait-cycle estimate of a sequence, or of every sequence in a directory");
    std::string cycle_in, cycle_out;
    cycle->add_option("--in", cycle_in, "Repaired world-track CSV or a directory of them")->required();
    cycle->add_option("--out", cycle_out, "JSON output (default: stdout)");
    Overrides cycle_over;
    auto add_cycle_options = [](Overrides& o, CLI::App* sub) {
        o.add<double>(sub, "--min-prominence", "Minimum peak prominence (m)",
                      [](auto& c, double v) { c.cycle.min_prominence = v; });
        o.add<int>(sub, "--fallback-cycle", "Cycle used when too few peaks are found",
                   [](auto& c, int v) { c.cycle.fallback_cycle = v; });
        o.add<std::string>(sub, "--trim", "iqr or percentile",
                           [](auto& c, const std::string& v) { c.cycle.trim = trim_rule_from_string(v); });
        o.add<std::string>(sub, "--cycle-mode", "global, per-seq or fixed",
                           [](auto& c, const std::string& v) { c.cycle.mode = cycle_mode_from_string(v); });
    };
    auto add_split_options = [](Overrides& o, CLI::App* sub) {
        o.add<std::string>(sub, "--split", "cross-walk, random or identity",
                           [](auto& c, const std::string& v) { c.classifier.split.mode = split_mode_from_string(v); });
        o.add<std::uint64_t>(sub, "--seed", "Split seed", [](auto& c, std::uint64_t v) { c.classifier.split.seed = v; });
        o.add<double>(sub, "--train-fraction", "Share of sequences used for training",
                      [](auto& c, double v) { c.classifier.split.train_fraction = v; });
    };
    add_cycle_options(cycle_over, cycle);
    add_split_options(cycle_over, cycle);
    cycle_over.flag(cycle, "--skip-repair", "Record the inputs as unrepaired", [](auto& c) { c.skip_repair = true; });

    // train-eval
    auto* train = app.add_subcommand("train-eval", "KNN identification from per-frame feature files");
    std::string train_features, train_cycles, train_report, train_plot;
    train->add_option("--features", train_features, "Directory of features CSVs")->required();
    train->add_option("--cycles", train_cycles, "cycles.json giving each sequence's window");
    train->add_option("--report", train_report, "EvalReport JSON");
    train->add_option("--emit-plot", train_plot, "Confusion-matrix SVG");
    Overrides train_over;
    auto add_classifier_options = [&](Overrides& o, CLI::App* sub) {
        o.add<int>(sub, "--k", "Neighbours", [](auto& c, int v) { c.classifier.k = v; });
        o.add<std::string>(sub, "--metric", "Distance metric (manhattan)",
                           [](auto& c, const std::string& v) { c.classifier.metric = metric_from_string(v); });
        o.add<std::string>(sub, "--f-average", "macro or micro",
                           [](auto& c, const std::string& v) { c.classifier.average = f_average_from_string(v); });
        o.add<int>(sub, "--window", "Concatenation window for every sequence", [](auto& c, int v) { c.window = v; });
        add_split_options(o, sub);
    };
    add_classifier_options(train_over, train);

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "ingest, project, repair, features, cycle, train-eval");
    bool baselines = false;
    Overrides pipe_over;
    pipe_over.add<std::string>(pipe, "--in", "Directory of detector files",
                               [](auto& c, const std::string& v) { c.io.input_dir = v; });
    pipe_over.add<std::string>(pipe, "--out", "Artifact directory",
                               [](auto& c, const std::string& v) { c.io.output_dir = v; });
    pipe_over.flag(pipe, "--skip-repair", "Bypass the repair stage", [](auto& c) { c.skip_repair = true; });
    pipe_over.add<std::string>(pipe, "--features", "joint-vectors, joint-distances or reference-vectors",
                               [](auto& c, const std::string& v) { c.classifier.scheme = feature_scheme_from_string(v); });
    pipe->add_flag("--baselines", baselines, "Also score segment lengths vs. joint vectors, repair on and off");
    add_cycle_options(pipe_over, pipe);
    add_classifier_options(pipe_over, pipe);

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        global.apply(cfg);

        if (*synth) {
            synth_over.apply(cfg);
            cfg.synth.camera = cfg.camera;
            cfg.validate();
            const auto data = generate_dataset(cfg.synth, cfg.jobs);
            write_dataset(synth_out, data);
            std::cout << "wrote " << data.size() << " sequences to " << synth_out << '\n';
            return 0;
        }

        if (*repair) {
            repair_over.apply(cfg);
            cfg.validate();
            const auto world = load_world(repair_in, cfg.camera);
            const SequenceRepair r = repair_sequence_detailed(world, cfg.repair);
            print_warnings(r.report.warnings);
            save_world_csv(repair_out, r.smoothed);
            if (!repair_report.empty())
                save_json(repair_report, repair_summary_json({{world.sequence_id, r.report}}));
            if (!plot_path.empty()) {
                const auto joint = joint_from_name(plot_joint);
                if (!joint)
                    throw ValidationError("unknown joint '" + plot_joint + "'");
                if (plot_axis.size() != 1 || plot_axis.find_first_of("xyz") != 0)
                    throw ValidationError("plot axis must be x, y or z");
                const Axis axis = static_cast<Axis>(plot_axis[0] - 'x');
                const std::string name = std::string(joint_name(*joint)) + " " + plot_axis;
                write_file(plot_path, track_panels_svg(world.sequence_id + ": " + name,
                                                       {{"input", world.track(*joint, axis).values, true},
                                                        {"after median correction", r.corrected.track(*joint, axis).values},
                                                        {"after smoothing", r.smoothed.track(*joint, axis).values}}));
            }
            std::cout << "missing corrected " << r.report.missing_corrections << ", jumps corrected "
                      << r.report.jump_corrections << ", uncorrectable " << r.report.uncorrectable << '\n';
            return 0;
        }

        if (*features) {
            features_over.apply(cfg);
            cfg.validate();
            const auto world = load_world(features_in, cfg.camera);
            const auto f = extract_features(world, cfg.classifier.scheme,
                                            allow_missing ? MissingJoints::Allow : MissingJoints::Reject);
            save_features_csv(features_out, f);
            return 0;
        }

        if (*cycle) {
            cycle_over.apply(cfg);
            cfg.validate();
            require_path(cycle_in);
            Json out;
            if (fs::is_directory(cycle_in)) {
                std::vector<WorldSkeletonSequence> seqs;
                for (const auto& p : files_in(cycle_in, ".csv"))
                    seqs.push_back(load_world_csv(p));
                std::vector<SequenceInfo> infos;
                for (const auto& s : seqs)
                    infos.push_back({s.sequence_id, s.subject_label, s.walk_type});
                const auto split = assign_split(infos, cfg.classifier.split);
                out = cycles_json(cycle_stage(seqs, split, cfg), split, cfg);
            } else {
                out = to_json(estimate_cycle(ankle_distance(load_world(cycle_in, cfg.camera)), cfg.cycle));
            }
            if (cycle_out.empty())
                std::cout << dump_json(out);
            else
                save_json(cycle_out, out);
            return 0;
        }

        if (*train) {
            train_over.apply(cfg);
            cfg.validate();
            require_path(train_features);
            std::vector<SequenceFeatures> feats;
            for (const auto& p : files_in(train_features, ".csv"))
                feats.push_back(load_features_csv(p));
            std::vector<SequenceInfo> infos;
            for (const auto& f : feats)
                infos.push_back({f.sequence_id, f.subject_label, f.walk_type});
            const auto split = assign_split(infos, cfg.classifier.split);

            CycleStage windows;
            bool repaired = !cfg.skip_repair;
            if (cfg.window) {
                windows.mode = "override";
                windows.window = *cfg.window;
                for (const auto& f : feats)
                    windows.windows[f.sequence_id] = *cfg.window;
            } else if (!train_cycles.empty()) {
                require_path(train_cycles);
                std::ifstream in(train_cycles);
                const Json j = Json::parse(in);
                windows = cycle_stage_from_json(j);
                repaired = j.value("repaired", repaired);
            } else {
                throw ValidationError("train-eval needs --cycles or --window");
            }
            EvalReport report = train_eval(feats, windows.windows, windows.window, split, cfg);
            report.cycle_mode = windows.mode;
            report.repaired = repaired;
            print_warnings(report.warnings);
            std::cout << format_report_table(report);
            if (!train_report.empty())
                save_json(train_report, to_json(report));
            if (!train_plot.empty())
                write_file(train_plot, confusion_svg("sequence-level confusion", report.subjects,
                                                     report.sequence_level.confusion));
            return 0;
        }

        if (*pipe) {
            pipe_over.apply(cfg);
            cfg.validate();
            if (cfg.io.input_dir.empty())
                throw ValidationError("pipeline needs an input directory (--in or io.input_dir)");
            const PipelineResult res = run_pipeline(cfg);
            print_warnings(res.report.warnings);
            std::cout << format_report_table(res.report);
            if (baselines) {
                const auto rows = baseline_suite(res.world, cfg);
                const std::string table = format_baseline_table(rows);
                write_file(cfg.io.output_dir / "baselines.txt", table);
                std::cout << '\n' << table;
            }
            return 0;
        }
    } catch (const InputNotFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
