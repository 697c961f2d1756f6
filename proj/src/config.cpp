#include "lidargait/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "lidargait/errors.hpp"
#include "lidargait/sequence_io.hpp"

namespace lidargait {

namespace {

/// Reads typed keys from one table and rejects anything it was not asked about.
class Section {
public:
    Section(const toml::table* table, std::string name) : m_table(table), m_name(std::move(name)) {}

    template <typename T>
    void read(const char* key, T& out) {
        m_known.insert(key);
        if (!m_table)
            return;
        const toml::node* node = m_table->get(key);
        if (!node)
            return;
        if constexpr (std::is_same_v<T, bool>) {
            if (auto v = node->value_exact<bool>())
                return void(out = *v);
        } else if constexpr (std::is_integral_v<T>) {
            if (auto v = node->value_exact<std::int64_t>())
                return void(out = static_cast<T>(*v));
        } else if constexpr (std::is_floating_point_v<T>) {
            if (auto v = node->value<double>())
                return void(out = *v);
        } else {
            if (auto v = node->value_exact<std::string>())
                return void(out = *v);
        }
        fail(key, "has the wrong type");
    }

    /// Reads a string key and converts it with `parse`.
    template <typename T, typename Parse>
    void read_enum(const char* key, T& out, Parse parse) {
        std::string text;
        bool present = m_table && m_table->get(key);
        read(key, text);
        if (present)
            out = parse(text);
    }

    void known(const char* key) { m_known.insert(key); }

    const toml::node* raw(const char* key) const { return m_table ? m_table->get(key) : nullptr; }

    void finish() const {
        if (!m_table)
            return;
        for (auto&& [k, v] : *m_table)
            if (!m_known.count(std::string(k.str())))
                throw ValidationError("config: unknown key '" + qualified(std::string(k.str())) + "'");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ValidationError("config: '" + qualified(key) + "' " + what);
    }

private:
    std::string qualified(const std::string& key) const { return m_name.empty() ? key : m_name + "." + key; }

    const toml::table* m_table;
    std::string m_name;
    std::set<std::string> m_known;
};

const toml::table* subtable(const toml::table& root, const char* key) {
    const toml::node* n = root.get(key);
    if (!n)
        return nullptr;
    if (!n->is_table())
        throw ValidationError(std::string("config: '") + key + "' must be a table");
    return n->as_table();
}

SubjectProfile read_profile(const toml::table& t, std::size_t index) {
    SubjectProfile p;
    Section s(&t, "synth.profile[" + std::to_string(index) + "]");
    s.read("label", p.label);
    s.known("limb_lengths");
    if (const auto* node = s.raw("limb_lengths")) {
        const auto* arr = node->as_array();
        if (!arr || arr->size() != p.limb_lengths.size())
            s.fail("limb_lengths", "must be an array of 12 numbers");
        for (std::size_t i = 0; i < p.limb_lengths.size(); ++i) {
            auto v = (*arr)[i].value<double>();
            if (!v)
                s.fail("limb_lengths", "must be an array of 12 numbers");
            p.limb_lengths[i] = *v;
        }
    }
    s.read("hip_half_width", p.hip_half_width);
    s.read("head_length", p.head_length);
    s.read("ankle_height", p.ankle_height);
    s.read("cadence_frames", p.cadence_frames);
    s.read("hip_amplitude", p.hip_amplitude);
    s.read("knee_amplitude", p.knee_amplitude);
    s.read("knee_phase", p.knee_phase);
    s.read("shoulder_amplitude", p.shoulder_amplitude);
    s.read("elbow_amplitude", p.elbow_amplitude);
    s.read("elbow_bend", p.elbow_bend);
    s.read("elbow_phase", p.elbow_phase);
    s.read("bob_amplitude", p.bob_amplitude);
    s.finish();
    return p;
}

std::string quoted(const std::string& s) {
    std::ostringstream os;
    os << toml::value<std::string>(s);
    return os.str();
}

} // namespace

PixelOrigin pixel_origin_from_string(const std::string& name) {
    if (name == "center")
        return PixelOrigin::Center;
    if (name == "corner")
        return PixelOrigin::Corner;
    throw ValidationError("unknown pixel origin '" + name + "' (expected center or corner)");
}

std::string to_string(PixelOrigin origin) {
    return origin == PixelOrigin::Center ? "center" : "corner";
}

void PipelineConfig::validate() const {
    camera.validate();
    repair.validate();
    cycle.validate();
    if (classifier.k < 1)
        throw ValidationError("classifier.k must be positive");
    if (window && *window < 1)
        throw ValidationError("window must be positive");
    if (jobs < 1)
        throw ValidationError("jobs must be positive");
    synth.corruption.validate();
    for (const auto& p : synth.profiles)
        p.validate();
}

PipelineConfig parse_config(std::string_view text, std::string_view source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ParseError(std::string(e.description()), static_cast<std::size_t>(e.source().begin.line));
    }

    PipelineConfig cfg;
    Section top(&root, "");
    for (const char* key : {"camera", "repair", "cycle", "classifier", "io", "pipeline", "synth"})
        top.known(key);
    top.finish();

    {
        Section s(subtable(root, "camera"), "camera");
        s.read("n_pixels_x", cfg.camera.n_pixels_x);
        s.read("n_pixels_y", cfg.camera.n_pixels_y);
        s.read("aov_x_deg", cfg.camera.aov_x_deg);
        s.read("aov_y_deg", cfg.camera.aov_y_deg);
        s.read_enum("pixel_origin", cfg.camera.origin, pixel_origin_from_string);
        s.finish();
    }
    {
        Section s(subtable(root, "repair"), "repair");
        s.read("window_card", cfg.repair.window_card);
        s.read("lookback", cfg.repair.lookback);
        s.read("smoothing_span", cfg.repair.smoothing_span);
        s.read("robust_iterations", cfg.repair.robust_iterations);
        s.read_enum("threshold_mode", cfg.repair.threshold_mode, threshold_mode_from_string);
        s.read("jump_factor", cfg.repair.jump_factor);
        s.read("max_jump_run", cfg.repair.max_jump_run);
        s.finish();
    }
    {
        Section s(subtable(root, "cycle"), "cycle");
        s.read("min_prominence", cfg.cycle.min_prominence);
        s.read("fallback_cycle", cfg.cycle.fallback_cycle);
        s.read_enum("trim", cfg.cycle.trim, trim_rule_from_string);
        s.read("iqr_factor", cfg.cycle.iqr_factor);
        s.read("lower_percentile", cfg.cycle.lower_percentile);
        s.read("upper_percentile", cfg.cycle.upper_percentile);
        s.read("stride", cfg.cycle.stride);
        s.read_enum("mode", cfg.cycle.mode, cycle_mode_from_string);
        s.read("fixed_window", cfg.cycle.fixed_window);
        s.finish();
    }
    {
        Section s(subtable(root, "classifier"), "classifier");
        s.read("k", cfg.classifier.k);
        s.read_enum("metric", cfg.classifier.metric, metric_from_string);
        s.read_enum("split", cfg.classifier.split.mode, split_mode_from_string);
        s.read("train_fraction", cfg.classifier.split.train_fraction);
        s.read("seed", cfg.classifier.split.seed);
        s.read_enum("f_average", cfg.classifier.average, f_average_from_string);
        s.read_enum("f1_classes", cfg.classifier.classes, f1_classes_from_string);
        s.read_enum("features", cfg.classifier.scheme, feature_scheme_from_string);
        s.finish();
    }
    {
        Section s(subtable(root, "io"), "io");
        std::string in = cfg.io.input_dir.string();
        std::string out = cfg.io.output_dir.string();
        s.read("input_dir", in);
        s.read("output_dir", out);
        cfg.io.input_dir = in;
        cfg.io.output_dir = out;
        s.finish();
    }
    {
        Section s(subtable(root, "pipeline"), "pipeline");
        s.read("skip_repair", cfg.skip_repair);
        s.read("jobs", cfg.jobs);
        int window = 0;
        const bool has_window = s.raw("window") != nullptr;
        s.read("window", window);
        if (has_window)
            cfg.window = window;
        s.finish();
    }
    if (const toml::table* synth = subtable(root, "synth")) {
        auto& d = cfg.synth;
        Section s(synth, "synth");
        s.read("subjects", d.n_subjects);
        s.read("seqs_per_subject", d.seqs_per_subject);
        s.read("frames", d.n_frames);
        s.read("seed", d.seed);
        s.read("dropout_rate", d.corruption.dropout_rate);
        s.read("burst_length", d.corruption.burst_length);
        s.read("jump_rate", d.corruption.jump_rate);
        s.read("jump_scale", d.corruption.jump_scale);
        s.read("jitter", d.corruption.jitter);
        s.read("corruption_seed", d.corruption.rng_seed);
        s.known("scene");
        s.known("profile");
        s.finish();

        Section scene(subtable(*synth, "scene"), "synth.scene");
        scene.read("camera_height", d.scene.camera_height);
        scene.read("lane_x", d.scene.lane_x);
        scene.read("center_depth", d.scene.center_depth);
        scene.read("half_depth", d.scene.half_depth);
        scene.read("toward_half_width", d.scene.toward_half_width);
        scene.read("diamond_half_width", d.scene.diamond_half_width);
        scene.read("turn_length", d.scene.turn_length);
        scene.finish();

        if (const toml::node* profiles = synth->get("profile")) {
            const toml::array* arr = profiles->as_array();
            if (!arr)
                throw ValidationError("config: 'synth.profile' must be an array of tables ([[synth.profile]])");
            for (std::size_t i = 0; i < arr->size(); ++i) {
                const toml::table* t = (*arr)[i].as_table();
                if (!t)
                    throw ValidationError("config: 'synth.profile' must be an array of tables ([[synth.profile]])");
                d.profiles.push_back(read_profile(*t, i));
            }
        }
    }
    cfg.synth.camera = cfg.camera;
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

std::string config_to_toml(const PipelineConfig& cfg) {
    std::ostringstream os;
    auto num = [](double v) { return format_double(v); };
    os << "[camera]\n"
       << "n_pixels_x = " << cfg.camera.n_pixels_x << "\n"
       << "n_pixels_y = " << cfg.camera.n_pixels_y << "\n"
       << "aov_x_deg = " << num(cfg.camera.aov_x_deg) << "\n"
       << "aov_y_deg = " << num(cfg.camera.aov_y_deg) << "\n"
       << "pixel_origin = " << quoted(to_string(cfg.camera.origin)) << "\n\n";
    os << "[repair]\n"
       << "window_card = " << cfg.repair.window_card << "\n"
       << "lookback = " << cfg.repair.lookback << "\n"
       << "smoothing_span = " << cfg.repair.smoothing_span << "\n"
       << "robust_iterations = " << cfg.repair.robust_iterations << "\n"
       << "threshold_mode = " << quoted(to_string(cfg.repair.threshold_mode)) << "\n"
       << "jump_factor = " << num(cfg.repair.jump_factor) << "\n"
       << "max_jump_run = " << cfg.repair.max_jump_run << "\n\n";
    os << "[cycle]\n"
       << "min_prominence = " << num(cfg.cycle.min_prominence) << "\n"
       << "fallback_cycle = " << cfg.cycle.fallback_cycle << "\n"
       << "trim = " << quoted(to_string(cfg.cycle.trim)) << "\n"
       << "iqr_factor = " << num(cfg.cycle.iqr_factor) << "\n"
       << "lower_percentile = " << num(cfg.cycle.lower_percentile) << "\n"
       << "upper_percentile = " << num(cfg.cycle.upper_percentile) << "\n"
       << "stride = " << cfg.cycle.stride << "\n"
       << "mode = " << quoted(to_string(cfg.cycle.mode)) << "\n"
       << "fixed_window = " << cfg.cycle.fixed_window << "\n\n";
    os << "[classifier]\n"
       << "k = " << cfg.classifier.k << "\n"
       << "metric = " << quoted(to_string(cfg.classifier.metric)) << "\n"
       << "split = " << quoted(to_string(cfg.classifier.split.mode)) << "\n"
       << "train_fraction = " << num(cfg.classifier.split.train_fraction) << "\n"
       << "seed = " << cfg.classifier.split.seed << "\n"
       << "f_average = " << quoted(to_string(cfg.classifier.average)) << "\n"
       << "f1_classes = " << quoted(to_string(cfg.classifier.classes)) << "\n"
       << "features = " << quoted(to_string(cfg.classifier.scheme)) << "\n\n";
    os << "[io]\n"
       << "input_dir = " << quoted(cfg.io.input_dir.string()) << "\n"
       << "output_dir = " << quoted(cfg.io.output_dir.string()) << "\n\n";
    os << "[pipeline]\n"
       << "skip_repair = " << (cfg.skip_repair ? "true" : "false") << "\n"
       << "jobs = " << cfg.jobs << "\n";
    if (cfg.window)
        os << "window = " << *cfg.window << "\n";
    const auto& d = cfg.synth;
    os << "\n[synth]\n"
       << "subjects = " << d.n_subjects << "\n"
       << "seqs_per_subject = " << d.seqs_per_subject << "\n"
       << "frames = " << d.n_frames << "\n"
       << "seed = " << d.seed << "\n"
       << "dropout_rate = " << num(d.corruption.dropout_rate) << "\n"
       << "burst_length = " << num(d.corruption.burst_length) << "\n"
       << "jump_rate = " << num(d.corruption.jump_rate) << "\n"
       << "jump_scale = " << num(d.corruption.jump_scale) << "\n"
       << "jitter = " << num(d.corruption.jitter) << "\n"
       << "corruption_seed = " << d.corruption.rng_seed << "\n\n";
    os << "[synth.scene]\n"
       << "camera_height = " << num(d.scene.camera_height) << "\n"
       << "lane_x = " << num(d.scene.lane_x) << "\n"
       << "center_depth = " << num(d.scene.center_depth) << "\n"
       << "half_depth = " << num(d.scene.half_depth) << "\n"
       << "toward_half_width = " << num(d.scene.toward_half_width) << "\n"
       << "diamond_half_width = " << num(d.scene.diamond_half_width) << "\n"
       << "turn_length = " << num(d.scene.turn_length) << "\n";
    for (const auto& p : d.profiles) {
        os << "\n[[synth.profile]]\n"
           << "label = " << quoted(p.label) << "\n"
           << "limb_lengths = [";
        for (std::size_t i = 0; i < p.limb_lengths.size(); ++i)
            os << (i ? ", " : "") << num(p.limb_lengths[i]);
        os << "]\n"
           << "hip_half_width = " << num(p.hip_half_width) << "\n"
           << "head_length = " << num(p.head_length) << "\n"
           << "ankle_height = " << num(p.ankle_height) << "\n"
           << "cadence_frames = " << num(p.cadence_frames) << "\n"
           << "hip_amplitude = " << num(p.hip_amplitude) << "\n"
           << "knee_amplitude = " << num(p.knee_amplitude) << "\n"
           << "knee_phase = " << num(p.knee_phase) << "\n"
           << "shoulder_amplitude = " << num(p.shoulder_amplitude) << "\n"
           << "elbow_amplitude = " << num(p.elbow_amplitude) << "\n"
           << "elbow_bend = " << num(p.elbow_bend) << "\n"
           << "elbow_phase = " << num(p.elbow_phase) << "\n"
           << "bob_amplitude = " << num(p.bob_amplitude) << "\n";
    }
    return os.str();
}

} // namespace lidargait
