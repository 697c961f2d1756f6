#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lidargait/evaluation.hpp"
#include "lidargait/features.hpp"
#include "lidargait/gait_cycle.hpp"
#include "lidargait/repair.hpp"
#include "lidargait/skeleton.hpp"
#include "lidargait/synth.hpp"

namespace lidargait {

struct ClassifierConfig {
    int k = 7;
    Metric metric = Metric::Manhattan;
    SplitSpec split;
    FAverage average = FAverage::Macro;
    F1Classes classes = F1Classes::Present;
    FeatureScheme scheme = FeatureScheme::JointVectors;
};

struct IoConfig {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir = "lidargait-out";
};

/// Everything a run needs. Every field has a default, so an empty file is a valid config.
struct PipelineConfig {
    CameraParams camera;
    RepairConfig repair;
    CycleOptions cycle;
    ClassifierConfig classifier;
    IoConfig io;
    DatasetSpec synth;
    bool skip_repair = false;
    /// Concatenation window forced for every sequence, bypassing cycle estimation.
    std::optional<int> window;
    int jobs = 1;

    /// Throws the component's validation error on the first invalid section.
    void validate() const;
};

/// Parses TOML text. Sections: [camera], [repair], [cycle], [classifier], [io], [pipeline], [synth],
/// [synth.scene] and [[synth.profile]]. Unknown keys and mistyped values are rejected with a ValidationError
/// naming the key; TOML syntax errors raise ParseError with the line.
PipelineConfig parse_config(std::string_view text, std::string_view source = "config");
PipelineConfig load_config(const std::filesystem::path& path);

/// The effective configuration as TOML, suitable for reloading.
std::string config_to_toml(const PipelineConfig& cfg);

PixelOrigin pixel_origin_from_string(const std::string& name);
std::string to_string(PixelOrigin origin);

} // namespace lidargait
