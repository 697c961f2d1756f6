#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "lidargait/evaluation.hpp"
#include "lidargait/gait_cycle.hpp"
#include "lidargait/repair.hpp"

namespace lidargait {

using Json = nlohmann::ordered_json;

/// Serializers emit keys in a fixed order; infinite thresholds become null.
Json to_json(const TrackRepairReport& report);
Json to_json(const RepairReport& report);
Json to_json(const CycleEstimate& estimate);
Json to_json(const LevelScores& scores, const std::vector<std::string>& subjects);
Json to_json(const EvalReport& report);

/// Per-sequence repair reports keyed by sequence id, with totals.
Json repair_summary_json(const std::map<std::string, RepairReport>& reports);

/// Two-space indented dump with a trailing newline.
std::string dump_json(const Json& json);
void save_json(const std::filesystem::path& path, const Json& json);

} // namespace lidargait
