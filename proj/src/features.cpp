#include "lidargait/features.hpp"

#include <charconv>
#include <fstream>

#include "lidargait/sequence_io.hpp"

namespace lidargait {

namespace {

constexpr std::string_view kFeaturesHeader = "# lidargait frame-features v1";

std::string pair_name(const JointPair& p) {
    return std::string(joint_name(p.first)) + "-" + std::string(joint_name(p.second));
}

void fill_row(FeatureScheme scheme, const SkeletonPoints<double>& pts, MissingJoints policy,
              Eigen::Ref<Eigen::RowVectorXd> row) {
    switch (scheme) {
    case FeatureScheme::JointVectors:
        row = frame_feature(pts, policy).transpose();
        break;
    case FeatureScheme::JointDistances: {
        const FrameFeature f = frame_feature(pts, policy);
        for (Index p = 0; p < static_cast<Index>(kFeaturePairs.size()); ++p)
            row(p) = f.segment<3>(3 * p).norm();
        break;
    }
    case FeatureScheme::ReferenceVectors: {
        frame_feature(pts, policy); // missing-joint check only
        for (std::size_t k = 1; k < kFeatureJoints.size(); ++k)
            row.segment<3>(3 * static_cast<Index>(k - 1)) = joint_vector(pts, JointId::Neck, kFeatureJoints[k]);
        break;
    }
    }
}

std::string trim_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' '))
        s.pop_back();
    return s;
}

} // namespace

int feature_dimension(FeatureScheme scheme) {
    switch (scheme) {
    case FeatureScheme::JointVectors:
        return kFrameFeatureSize;
    case FeatureScheme::JointDistances:
        return static_cast<int>(kFeaturePairs.size());
    case FeatureScheme::ReferenceVectors:
        return 3 * (static_cast<int>(kFeatureJoints.size()) - 1);
    }
    return 0;
}

std::vector<std::string> feature_column_names(FeatureScheme scheme) {
    std::vector<std::string> names;
    switch (scheme) {
    case FeatureScheme::JointVectors:
        for (const auto& p : kFeaturePairs)
            for (const char* c : {"_dx", "_dy", "_dz"})
                names.push_back(pair_name(p) + c);
        break;
    case FeatureScheme::JointDistances:
        for (const auto& p : kFeaturePairs)
            names.push_back(pair_name(p) + "_len");
        break;
    case FeatureScheme::ReferenceVectors:
        for (std::size_t k = 1; k < kFeatureJoints.size(); ++k)
            for (const char* c : {"_dx", "_dy", "_dz"})
                names.push_back("ref_" + pair_name({JointId::Neck, kFeatureJoints[k]}) + c);
        break;
    }
    return names;
}

FeatureMatrix sequence_features(const WorldSkeletonSequence& seq, FeatureScheme scheme, MissingJoints policy) {
    FeatureMatrix out(seq.frames(), feature_dimension(scheme));
    for (Index f = 0; f < seq.frames(); ++f)
        fill_row(scheme, seq.frame_points(f), policy, out.row(f));
    return out;
}

FeatureScheme feature_scheme_from_string(const std::string& name) {
    if (name == "joint-vectors")
        return FeatureScheme::JointVectors;
    if (name == "joint-distances")
        return FeatureScheme::JointDistances;
    if (name == "reference-vectors")
        return FeatureScheme::ReferenceVectors;
    throw ValidationError("unknown feature scheme '" + name +
                          "' (expected joint-vectors, joint-distances or reference-vectors)");
}

std::string to_string(FeatureScheme scheme) {
    switch (scheme) {
    case FeatureScheme::JointVectors:
        return "joint-vectors";
    case FeatureScheme::JointDistances:
        return "joint-distances";
    case FeatureScheme::ReferenceVectors:
        return "reference-vectors";
    }
    return {};
}

SequenceFeatures extract_features(const WorldSkeletonSequence& seq, FeatureScheme scheme, MissingJoints policy) {
    SequenceFeatures out;
    out.sequence_id = seq.sequence_id;
    out.subject_label = seq.subject_label;
    out.walk_type = seq.walk_type;
    out.scheme = scheme;
    out.frame_indices = seq.frame_indices;
    out.values = sequence_features(seq, scheme, policy);
    return out;
}

void write_features_csv(std::ostream& out, const SequenceFeatures& features) {
    out << kFeaturesHeader << '\n';
    out << "# sequence=" << features.sequence_id << '\n';
    out << "# subject=" << features.subject_label << '\n';
    out << "# walk=" << features.walk_type << '\n';
    out << "# scheme=" << to_string(features.scheme) << '\n';
    out << "sequence,frame";
    for (const auto& name : feature_column_names(features.scheme))
        out << ',' << name;
    out << '\n';
    for (Index r = 0; r < features.values.rows(); ++r) {
        out << features.sequence_id << ',' << features.frame_indices[static_cast<std::size_t>(r)];
        for (Index c = 0; c < features.values.cols(); ++c)
            out << ',' << format_double(features.values(r, c));
        out << '\n';
    }
}

SequenceFeatures read_features_csv(std::istream& in) {
    SequenceFeatures out;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim_cr(line) != kFeaturesHeader)
        throw ParseError("missing frame-features header", 1);
    bool have_columns = false;
    int dim = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            auto key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const auto value = line.substr(eq + 1);
            if (key == "sequence")
                out.sequence_id = value;
            else if (key == "subject")
                out.subject_label = value;
            else if (key == "walk")
                out.walk_type = value;
            else if (key == "scheme")
                out.scheme = feature_scheme_from_string(value);
            continue;
        }
        const auto fields = split_csv_line(line);
        if (!have_columns) {
            dim = feature_dimension(out.scheme);
            if (static_cast<int>(fields.size()) != dim + 2)
                throw ParseError("feature column count does not match scheme " + to_string(out.scheme), line_no);
            have_columns = true;
            continue;
        }
        if (static_cast<int>(fields.size()) != dim + 2)
            throw ParseError("expected " + std::to_string(dim + 2) + " fields", line_no);
        std::int64_t frame = 0;
        auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), frame);
        if (ec != std::errc() || p != fields[1].data() + fields[1].size())
            throw ParseError("bad frame index '" + fields[1] + "'", line_no);
        out.frame_indices.push_back(frame);
        std::vector<double> row(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) {
            const auto& text = fields[static_cast<std::size_t>(c) + 2];
            auto [q, ec2] = std::from_chars(text.data(), text.data() + text.size(), row[static_cast<std::size_t>(c)]);
            if (ec2 != std::errc() || q != text.data() + text.size())
                throw ParseError("bad feature value '" + text + "'", line_no);
        }
        rows.push_back(std::move(row));
    }
    out.values.resize(static_cast<Index>(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.values.row(static_cast<Index>(r)) = Eigen::Map<const Eigen::RowVectorXd>(rows[r].data(), dim);
    return out;
}

void save_features_csv(const std::filesystem::path& path, const SequenceFeatures& features) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write '" + path.string() + "'");
    write_features_csv(out, features);
}

SequenceFeatures load_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    return read_features_csv(in);
}

} // namespace lidargait
