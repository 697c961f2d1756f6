#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lidargait/skeleton.hpp"

namespace lidargait {

enum class SequenceFormat { Jsonl, Csv };

/// Picks the format from the file extension (.jsonl / .csv). Throws ValidationError otherwise.
SequenceFormat format_from_path(const std::filesystem::path& path);

/// Reads one walking sequence of 2D joints + range.
///
/// JSONL: one record per line, `{"frame": int, "subject": str, "walk": str, "joints": {"Neck": [x, y, r] | null, ...}}`.
/// CSV: header `frame,subject,walk,Head_x,Head_y,Head_range,...` (14 joints in canonical order), empty cell = missing.
/// Absent or null joints, non-positive range, and negative pixel coordinates are read as missing.
/// Unknown joint names are ignored with a warning. Frames come back sorted by index.
/// Throws ParseError (with line number) on malformed records and ValidationError on duplicate frame indices
/// or inconsistent subject / walk labels.
RawSequence load_sequence(const std::filesystem::path& path, SequenceFormat format);
RawSequence load_sequence(const std::filesystem::path& path);

RawSequence read_sequence_jsonl(std::istream& in, std::string sequence_id = {});
RawSequence read_sequence_csv(std::istream& in, std::string sequence_id = {});

/// Canonical writers: joints in canonical order, missing joints as null / empty cells,
/// shortest round-trip decimal for every number.
void write_sequence_jsonl(std::ostream& out, const RawSequence& seq);
void write_sequence_csv(std::ostream& out, const RawSequence& seq);
void save_sequence(const std::filesystem::path& path, const RawSequence& seq);

/// World-track artifact: `#` metadata header, then `frame` + 42 `<Joint>_<axis>` columns.
void write_world_csv(std::ostream& out, const WorldSkeletonSequence& seq);
WorldSkeletonSequence read_world_csv(std::istream& in);
void save_world_csv(const std::filesystem::path& path, const WorldSkeletonSequence& seq);
WorldSkeletonSequence load_world_csv(const std::filesystem::path& path);

/// True when the file starts with the world-track artifact header.
bool is_world_csv(const std::filesystem::path& path);

/// Sorted list of *.jsonl / *.csv files directly inside `dir`.
std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Splits one CSV line; double-quoted fields may contain commas.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace lidargait
