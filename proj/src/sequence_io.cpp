#include "lidargait/sequence_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lidargait/errors.hpp"

namespace lidargait {

namespace {

constexpr std::string_view kWorldHeader = "# lidargait world-tracks v1";

struct LabelCheck {
    bool seen = false;
    std::string subject;
    std::string walk;

    void apply(RawSequence& seq, const std::string& subject_in, const std::string& walk_in, std::size_t line) {
        if (!seen) {
            seen = true;
            subject = subject_in;
            walk = walk_in;
            seq.subject = subject;
            seq.walk = walk;
            return;
        }
        if (subject_in != subject || walk_in != walk)
            throw ValidationError("line " + std::to_string(line) + ": subject/walk '" + subject_in + "'/'" + walk_in +
                                  "' differs from '" + subject + "'/'" + walk + "' in the same file");
    }
};

JointObservation make_observation(double x, double y, double r, RawSequence& seq, std::string_view joint,
                                  std::size_t line) {
    JointObservation obs{x, y, r, false};
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(r) || r <= 0.0)
        return JointObservation{};
    if (x < 0.0 || y < 0.0) {
        seq.warnings.push_back("line " + std::to_string(line) + ": negative pixel coordinate for " +
                               std::string(joint) + " read as missing");
        return JointObservation{};
    }
    obs.valid = true;
    return obs;
}

void finalize(RawSequence& seq) {
    std::stable_sort(seq.frames.begin(), seq.frames.end(),
                     [](const RawSkeletonFrame& a, const RawSkeletonFrame& b) { return a.frame_index < b.frame_index; });
    for (std::size_t i = 1; i < seq.frames.size(); ++i) {
        if (seq.frames[i].frame_index == seq.frames[i - 1].frame_index)
            throw ValidationError("duplicate frame index " + std::to_string(seq.frames[i].frame_index));
    }
}

double parse_number(const std::string& text, std::size_t line, const std::string& what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError("cannot parse " + what + " '" + text + "'", line);
    return value;
}

std::int64_t parse_integer(const std::string& text, std::size_t line, const std::string& what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("cannot parse " + what + " '" + text + "'", line);
    return value;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
        ++i;
    return s.substr(i);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

SequenceFormat format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".jsonl")
        return SequenceFormat::Jsonl;
    if (ext == ".csv")
        return SequenceFormat::Csv;
    throw ValidationError("unknown sequence format for '" + path.string() + "' (expected .jsonl or .csv)");
}

RawSequence read_sequence_jsonl(std::istream& in, std::string sequence_id) {
    using nlohmann::json;
    RawSequence seq;
    seq.sequence_id = std::move(sequence_id);
    LabelCheck labels;
    std::set<std::string> unknown_reported;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!rec.is_object())
            throw ParseError("record is not a JSON object", line_no);
        const auto frame_it = rec.find("frame");
        if (frame_it == rec.end() || !frame_it->is_number_integer())
            throw ParseError("missing or non-integer 'frame'", line_no);
        const auto subject_it = rec.find("subject");
        const auto walk_it = rec.find("walk");
        if (subject_it == rec.end() || !subject_it->is_string())
            throw ParseError("missing or non-string 'subject'", line_no);
        if (walk_it == rec.end() || !walk_it->is_string())
            throw ParseError("missing or non-string 'walk'", line_no);
        const auto joints_it = rec.find("joints");
        if (joints_it == rec.end() || !joints_it->is_object())
            throw ParseError("missing or non-object 'joints'", line_no);

        RawSkeletonFrame frame;
        frame.frame_index = frame_it->get<std::int64_t>();
        if (frame.frame_index < 0)
            throw ValidationError("line " + std::to_string(line_no) + ": negative frame index");
        labels.apply(seq, subject_it->get<std::string>(), walk_it->get<std::string>(), line_no);

        for (const auto& [name, value] : joints_it->items()) {
            const auto id = joint_from_name(name);
            if (!id) {
                if (unknown_reported.insert(name).second)
                    seq.warnings.push_back("ignoring unknown joint '" + name + "'");
                continue;
            }
            if (value.is_null())
                continue;
            if (!value.is_array() || value.size() != 3 ||
                !std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_number(); }))
                throw ParseError("joint '" + name + "' must be [x_px, y_px, range_m] or null", line_no);
            frame[*id] = make_observation(value[0].get<double>(), value[1].get<double>(), value[2].get<double>(), seq,
                                          name, line_no);
        }
        seq.frames.push_back(frame);
    }
    finalize(seq);
    return seq;
}

RawSequence read_sequence_csv(std::istream& in, std::string sequence_id) {
    RawSequence seq;
    seq.sequence_id = std::move(sequence_id);
    LabelCheck labels;
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#')
            continue;
        header = split_csv_line(trim(line));
    }
    if (header.empty())
        throw ParseError("empty CSV file");
    if (header.size() < 3 || header[0] != "frame" || header[1] != "subject" || header[2] != "walk")
        throw ParseError("CSV header must start with frame,subject,walk", line_no);

    // column -> (joint, component) for known joints; unknown joint groups are skipped
    struct Slot {
        int joint = -1;
        int component = -1;
    };
    std::vector<Slot> slots(header.size());
    std::set<std::string> unknown_reported;
    for (std::size_t c = 3; c < header.size(); ++c) {
        const auto& name = header[c];
        const auto pos = name.rfind('_');
        if (pos == std::string::npos)
            throw ParseError("bad joint column '" + name + "'", line_no);
        const auto joint = name.substr(0, pos);
        const auto comp = name.substr(pos + 1);
        const int component = comp == "x" ? 0 : comp == "y" ? 1 : comp == "range" ? 2 : -1;
        if (component < 0)
            throw ParseError("bad joint column '" + name + "'", line_no);
        const auto id = joint_from_name(joint);
        if (!id) {
            if (unknown_reported.insert(joint).second)
                seq.warnings.push_back("ignoring unknown joint '" + joint + "'");
            continue;
        }
        slots[c] = Slot{index_of(*id), component};
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_csv_line(trim(line));
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        RawSkeletonFrame frame;
        frame.frame_index = parse_integer(fields[0], line_no, "frame");
        if (frame.frame_index < 0)
            throw ValidationError("line " + std::to_string(line_no) + ": negative frame index");
        labels.apply(seq, fields[1], fields[2], line_no);

        std::array<std::array<std::optional<double>, 3>, kJointCount> cells{};
        for (std::size_t c = 3; c < fields.size(); ++c) {
            if (slots[c].joint < 0 || fields[c].empty())
                continue;
            cells[static_cast<std::size_t>(slots[c].joint)][static_cast<std::size_t>(slots[c].component)] =
                parse_number(fields[c], line_no, header[c]);
        }
        for (int j = 0; j < kJointCount; ++j) {
            const auto& cell = cells[static_cast<std::size_t>(j)];
            if (!cell[0] || !cell[1] || !cell[2])
                continue;
            frame.joints[static_cast<std::size_t>(j)] =
                make_observation(*cell[0], *cell[1], *cell[2], seq, kJointNames[static_cast<std::size_t>(j)], line_no);
        }
        seq.frames.push_back(frame);
    }
    finalize(seq);
    return seq;
}

RawSequence load_sequence(const std::filesystem::path& path, SequenceFormat format) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    const auto id = path.stem().string();
    return format == SequenceFormat::Jsonl ? read_sequence_jsonl(in, id) : read_sequence_csv(in, id);
}

RawSequence load_sequence(const std::filesystem::path& path) {
    return load_sequence(path, format_from_path(path));
}

void write_sequence_jsonl(std::ostream& out, const RawSequence& seq) {
    using nlohmann::ordered_json;
    for (const auto& frame : seq.frames) {
        ordered_json rec;
        rec["frame"] = frame.frame_index;
        rec["subject"] = seq.subject;
        rec["walk"] = seq.walk;
        ordered_json joints = ordered_json::object();
        for (int j = 0; j < kJointCount; ++j) {
            const auto& obs = frame.joints[static_cast<std::size_t>(j)];
            const std::string name(kJointNames[static_cast<std::size_t>(j)]);
            if (obs.valid)
                joints[name] = ordered_json::array({obs.x_px, obs.y_px, obs.range_m});
            else
                joints[name] = nullptr;
        }
        rec["joints"] = std::move(joints);
        out << rec.dump() << '\n';
    }
}

void write_sequence_csv(std::ostream& out, const RawSequence& seq) {
    out << "frame,subject,walk";
    for (auto name : kJointNames)
        out << ',' << name << "_x," << name << "_y," << name << "_range";
    out << '\n';
    for (const auto& frame : seq.frames) {
        out << frame.frame_index << ',' << csv_field(seq.subject) << ',' << csv_field(seq.walk);
        for (const auto& obs : frame.joints) {
            if (obs.valid)
                out << ',' << format_double(obs.x_px) << ',' << format_double(obs.y_px) << ','
                    << format_double(obs.range_m);
            else
                out << ",,,";
        }
        out << '\n';
    }
}

void save_sequence(const std::filesystem::path& path, const RawSequence& seq) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write '" + path.string() + "'");
    if (format_from_path(path) == SequenceFormat::Jsonl)
        write_sequence_jsonl(out, seq);
    else
        write_sequence_csv(out, seq);
}

void write_world_csv(std::ostream& out, const WorldSkeletonSequence& seq) {
    seq.validate();
    out << kWorldHeader << '\n';
    out << "# sequence=" << seq.sequence_id << '\n';
    out << "# subject=" << seq.subject_label << '\n';
    out << "# walk=" << seq.walk_type << '\n';
    out << "frame";
    for (auto name : kJointNames)
        out << ',' << name << "_x," << name << "_y," << name << "_z";
    out << '\n';
    for (Index f = 0; f < seq.frames(); ++f) {
        out << seq.frame_indices[static_cast<std::size_t>(f)];
        for (Index c = 0; c < kTrackCount; ++c)
            out << ',' << format_double(seq.tracks(f, c));
        out << '\n';
    }
}

WorldSkeletonSequence read_world_csv(std::istream& in) {
    WorldSkeletonSequence seq;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || trim(line) != kWorldHeader)
        throw ParseError("missing world-track header", 1);
    ++line_no;
    bool have_columns = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            const auto key = trim(line.substr(1, eq - 1));
            const auto value = line.substr(eq + 1);
            if (key == "sequence")
                seq.sequence_id = value;
            else if (key == "subject")
                seq.subject_label = value;
            else if (key == "walk")
                seq.walk_type = value;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (!have_columns) {
            if (fields.size() != kTrackCount + 1 || fields[0] != "frame")
                throw ParseError("world-track column header must be frame + 42 joint columns", line_no);
            have_columns = true;
            continue;
        }
        if (fields.size() != kTrackCount + 1)
            throw ParseError("expected 43 fields, found " + std::to_string(fields.size()), line_no);
        seq.frame_indices.push_back(parse_integer(fields[0], line_no, "frame"));
        std::vector<double> row(kTrackCount);
        for (int c = 0; c < kTrackCount; ++c)
            row[static_cast<std::size_t>(c)] = parse_number(fields[static_cast<std::size_t>(c) + 1], line_no, "value");
        rows.push_back(std::move(row));
    }
    seq.tracks.resize(static_cast<Index>(rows.size()), kTrackCount);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < kTrackCount; ++c)
            seq.tracks(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    return seq;
}

void save_world_csv(const std::filesystem::path& path, const WorldSkeletonSequence& seq) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write '" + path.string() + "'");
    write_world_csv(out, seq);
}

WorldSkeletonSequence load_world_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    return read_world_csv(in);
}

bool is_world_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    return in && std::getline(in, line) && trim(line) == kWorldHeader;
}

std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".jsonl" || ext == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace lidargait
