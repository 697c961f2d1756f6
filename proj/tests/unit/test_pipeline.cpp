#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lidargait/pipeline.hpp"
#include "lidargait/sequence_io.hpp"
#include "lidargait/synth.hpp"

using namespace lidargait;
namespace fs = std::filesystem;

namespace {

std::vector<SyntheticSequence> small_dataset(double dropout = 0.2) {
    DatasetSpec spec;
    spec.n_subjects = 4;
    spec.seqs_per_subject = 4;
    spec.n_frames = 90;
    spec.seed = 3;
    spec.corruption.dropout_rate = dropout;
    spec.corruption.jump_rate = 0.02;
    spec.corruption.rng_seed = 5;
    return generate_dataset(spec);
}

std::vector<WorldSkeletonSequence> corrupted_world(const std::vector<SyntheticSequence>& data) {
    std::vector<WorldSkeletonSequence> out;
    for (const auto& s : data)
        out.push_back(s.corrupted.sequence);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : m_path(fs::temp_directory_path() / ("lidargait_" + name)) {
        fs::remove_all(m_path);
        fs::create_directories(m_path);
    }
    ~TempDir() { fs::remove_all(m_path); }
    const fs::path& path() const { return m_path; }

private:
    fs::path m_path;
};

} // namespace

TEST(Pipeline, InMemoryRunProducesReport) {
    PipelineConfig cfg;
    const auto res = run_from_world(corrupted_world(small_dataset()), cfg);
    EXPECT_EQ(res.repaired.size(), 16u);
    EXPECT_EQ(res.repair_reports.size(), 16u);
    EXPECT_GT(res.cycle_stage.window, 1);
    EXPECT_EQ(res.report.window, res.cycle_stage.window);
    EXPECT_EQ(res.report.cycle_mode, "global");
    EXPECT_TRUE(res.report.repaired);
    EXPECT_EQ(res.report.subjects.size(), 4u);
    EXPECT_FALSE(res.split.test_ids.empty());
    for (const auto& s : res.repaired)
        EXPECT_FALSE((s.tracks.array() == 0.0).any());
}

TEST(Pipeline, GlobalWindowVotedOnTrainingOnly) {
    PipelineConfig cfg;
    const auto res = run_from_world(corrupted_world(small_dataset()), cfg);
    std::vector<CycleEstimate> train;
    for (const auto& [id, est] : res.cycle_stage.cycles)
        if (res.split.is_train(id))
            train.push_back(est);
    EXPECT_EQ(res.cycle_stage.window, vote_global_cycle(train));
}

TEST(Pipeline, SkipRepairKeepsWorld) {
    PipelineConfig cfg;
    cfg.skip_repair = true;
    const auto world = corrupted_world(small_dataset());
    const auto res = run_from_world(world, cfg);
    EXPECT_TRUE(res.repair_reports.empty());
    for (std::size_t i = 0; i < world.size(); ++i)
        EXPECT_EQ(res.repaired[i].tracks, world[i].tracks);
    EXPECT_FALSE(res.report.repaired);
}

TEST(Pipeline, PerSequenceWindows) {
    PipelineConfig cfg;
    cfg.cycle.mode = CycleMode::PerSequence;
    const auto res = run_from_world(corrupted_world(small_dataset(0.05)), cfg);
    EXPECT_EQ(res.cycle_stage.window, 0);
    for (const auto& [id, w] : res.cycle_stage.windows)
        EXPECT_EQ(w, res.cycle_stage.cycles.at(id).cycle_frames);
    EXPECT_EQ(res.report.sequence_level.total, static_cast<long>(res.split.test_ids.size()));
}

TEST(Pipeline, ForcedWindow) {
    PipelineConfig cfg;
    cfg.window = 1;
    const auto res = run_from_world(corrupted_world(small_dataset()), cfg);
    EXPECT_EQ(res.report.window, 1);
    EXPECT_EQ(res.cycle_stage.mode, "override");
}

TEST(Pipeline, TooFewSubjectsIsStageError) {
    auto world = corrupted_world(small_dataset());
    world.resize(3);
    try {
        run_from_world(world, PipelineConfig{});
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "ingest");
    }
}

TEST(Pipeline, MissingInputDirectory) {
    PipelineConfig cfg;
    cfg.io.input_dir = "/nonexistent/lidargait/input";
    EXPECT_THROW(run_pipeline(cfg), InputNotFound);
}

TEST(Pipeline, ArtifactsAndRestart) {
    TempDir tmp("pipeline_restart");
    const auto data = small_dataset();
    write_dataset(tmp.path() / "in", data);
    PipelineConfig cfg;
    cfg.io.input_dir = tmp.path() / "in";
    cfg.io.output_dir = tmp.path() / "out";
    const auto res = run_pipeline(cfg);
    for (const char* name : {"cycles.json", "eval_report.json", "eval_report.txt", "config.toml", "confusion.svg",
                             "repair_report.json"})
        EXPECT_TRUE(fs::exists(cfg.io.output_dir / name)) << name;
    EXPECT_EQ(list_sequence_files(cfg.io.output_dir / "world").size(), data.size());

    // repaired artifacts follow from the world artifacts
    for (const auto& s : res.world) {
        const auto world = load_world_csv(cfg.io.output_dir / "world" / (s.sequence_id + ".csv"));
        const auto [again, report] = repair_sequence(world, cfg.repair);
        std::ostringstream os;
        write_world_csv(os, again);
        EXPECT_EQ(os.str(), slurp(cfg.io.output_dir / "repaired" / (s.sequence_id + ".csv")));
    }

    // train-eval from the feature and cycle artifacts reproduces the report
    std::vector<SequenceFeatures> features;
    for (const auto& f : res.features)
        features.push_back(load_features_csv(cfg.io.output_dir / "features" / (f.sequence_id + ".csv")));
    std::ifstream cycles_in(cfg.io.output_dir / "cycles.json");
    const auto stage = cycle_stage_from_json(Json::parse(cycles_in));
    EXPECT_EQ(stage.windows, res.cycle_stage.windows);
    auto report = train_eval(features, stage.windows, stage.window, res.split, cfg);
    report.cycle_mode = stage.mode;
    report.repaired = true;
    EXPECT_EQ(dump_json(to_json(report)), slurp(cfg.io.output_dir / "eval_report.json"));
}

TEST(Pipeline, DeterministicReport) {
    const auto world = corrupted_world(small_dataset());
    PipelineConfig a;
    PipelineConfig b;
    b.jobs = 3;
    EXPECT_EQ(dump_json(to_json(run_from_world(world, a).report)),
              dump_json(to_json(run_from_world(world, b).report)));
}

TEST(Pipeline, BaselineSuiteShape) {
    const auto rows = baseline_suite(corrupted_world(small_dataset()), PipelineConfig{});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].scheme, FeatureScheme::JointDistances);
    EXPECT_FALSE(rows[0].repaired);
    EXPECT_TRUE(rows[3].repaired);
    EXPECT_NE(format_baseline_table(rows).find("joint-vectors"), std::string::npos);
}

TEST(Pipeline, CleanDataRepairBarelyMatters) {
    const auto data = small_dataset(0.0);
    std::vector<WorldSkeletonSequence> clean;
    for (const auto& s : data)
        clean.push_back(s.clean);
    PipelineConfig on, off;
    off.skip_repair = true;
    const auto a = run_from_world(clean, on).report;
    const auto b = run_from_world(clean, off).report;
    EXPECT_LE(std::abs(a.sequence_level.accuracy - b.sequence_level.accuracy), 0.01);
    EXPECT_LE(std::abs(a.sequence_level.f_score - b.sequence_level.f_score), 0.01);
}
