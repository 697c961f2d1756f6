#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lidargait/config.hpp"
#include "lidargait/evaluation.hpp"
#include "lidargait/features.hpp"
#include "lidargait/gait_cycle.hpp"
#include "lidargait/repair.hpp"
#include "lidargait/report_json.hpp"
#include "lidargait/skeleton.hpp"

namespace lidargait {

/// The input directory does not exist or is not a directory.
class InputNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline stage failed; `stage()` names it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), m_stage(std::move(stage)) {}

    const std::string& stage() const noexcept { return m_stage; }

private:
    std::string m_stage;
};

struct CycleStage {
    std::map<std::string, CycleEstimate> cycles;
    /// Concatenation window per sequence id.
    std::map<std::string, int> windows;
    /// The shared window, or 0 when sequences use their own.
    int window = 1;
    /// "global", "per-seq", "fixed", or "override" for a forced window.
    std::string mode;
};

/// Cycle estimates of every sequence and the windows they imply. The global vote uses training sequences only.
CycleStage cycle_stage(const std::vector<WorldSkeletonSequence>& repaired, const SplitAssignment& split,
                       const PipelineConfig& cfg);
Json cycles_json(const CycleStage& stage, const SplitAssignment& split, const PipelineConfig& cfg);
CycleStage cycle_stage_from_json(const Json& json);

struct PipelineResult {
    std::vector<WorldSkeletonSequence> world;
    /// Equal to `world` when repair is skipped.
    std::vector<WorldSkeletonSequence> repaired;
    std::map<std::string, RepairReport> repair_reports;
    std::vector<SequenceFeatures> features;
    SplitAssignment split;
    CycleStage cycle_stage;
    EvalReport report;
};

/// Loads every sequence file directly inside `dir`, in name order.
std::vector<RawSequence> ingest_directory(const std::filesystem::path& dir, int jobs = 1);

std::vector<WorldSkeletonSequence> project_sequences(const std::vector<RawSequence>& raw, const CameraParams& cam,
                                                     int jobs = 1);

/// Repair, features, cycle estimation and train-eval on projected sequences, in memory.
/// Needs at least 2 subjects with 2 sequences each.
PipelineResult run_from_world(std::vector<WorldSkeletonSequence> world, const PipelineConfig& cfg);

/// The full pipeline from cfg.io.input_dir, writing every stage artifact under cfg.io.output_dir.
/// Throws InputNotFound for a missing input directory and StageError for anything else.
PipelineResult run_pipeline(const PipelineConfig& cfg);

void write_artifacts(const PipelineResult& result, const PipelineConfig& cfg);

/// Window features of `features` at each sequence's window, labeled by subject.
LabeledDataset build_dataset(const std::vector<SequenceFeatures>& features, const std::map<std::string, int>& windows,
                             int stride, std::vector<std::string>* warnings = nullptr);

/// KNN train-eval over frame features, each sequence windowed at `windows[id]`. `shared_window` = 0 means the
/// windows differ; test sequences are then scored per window width against training windows of that width.
EvalReport train_eval(const std::vector<SequenceFeatures>& features, const std::map<std::string, int>& windows,
                      int shared_window, const SplitAssignment& split, const PipelineConfig& cfg);

struct BaselineRow {
    FeatureScheme scheme;
    bool repaired;
    EvalReport report;
};

/// The same split scored with segment-length features and inter-joint vectors, with and without repair.
std::vector<BaselineRow> baseline_suite(const std::vector<WorldSkeletonSequence>& world, const PipelineConfig& cfg);

std::string format_baseline_table(const std::vector<BaselineRow>& rows);

} // namespace lidargait
