#include "stiffbench/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "stiffbench/error.hpp"

namespace stiffbench {

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) throw ConfigError("not a number: '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) throw ConfigError("not a non-negative integer: '" + v + "'");
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError("not a boolean: '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Key {
    std::string section;
    std::string name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define SB_NUMBER(SEC, NAME, EXPR)                                                     \
    Key {                                                                              \
        SEC, NAME, [](const RunConfig& c) { return format_number(c.EXPR); },           \
            [](RunConfig& c, const std::string& v) { c.EXPR = to_double(v); }          \
    }
#define SB_BOOL(SEC, NAME, EXPR)                                                       \
    Key {                                                                              \
        SEC, NAME, [](const RunConfig& c) { return from_bool(c.EXPR); },               \
            [](RunConfig& c, const std::string& v) { c.EXPR = to_bool(v); }            \
    }
#define SB_STRING(SEC, NAME, EXPR)                                                     \
    Key {                                                                              \
        SEC, NAME, [](const RunConfig& c) { return c.EXPR; },                          \
            [](RunConfig& c, const std::string& v) { c.EXPR = v; }                     \
    }

std::string tasks_text(const std::vector<Task>& tasks) {
    std::string out;
    for (Task t : tasks) {
        if (!out.empty()) out += ",";
        out += task_name(t);
    }
    return out;
}

std::vector<Task> parse_tasks(const std::string& v) {
    std::vector<Task> out;
    std::stringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_task(trim(item)));
    if (out.empty()) throw ConfigError("empty task list");
    return out;
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        {"run", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
         [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); }},
        {"run", "method", [](const RunConfig& c) { return std::to_string(method_number(c.method)); },
         [](RunConfig& c, const std::string& v) { c.method = parse_method(v); }},
        SB_STRING("run", "schedule", schedule),
        SB_STRING("run", "out", out),
        SB_STRING("run", "out_dir", out_dir),
        SB_STRING("run", "participant", participant),
        {"run", "participants", [](const RunConfig& c) { return std::to_string(c.participants); },
         [](RunConfig& c, const std::string& v) { c.participants = static_cast<int>(to_u64(v)); }},
        {"run", "tasks", [](const RunConfig& c) { return tasks_text(c.session.tasks); },
         [](RunConfig& c, const std::string& v) { c.session.tasks = parse_tasks(v); }},
        SB_BOOL("run", "practice", session.practice),
        {"run", "log_detail", [](const RunConfig& c) { return std::string(log_detail_name(c.session.log_detail)); },
         [](RunConfig& c, const std::string& v) { c.session.log_detail = parse_log_detail(v); }},
        SB_BOOL("run", "elide_unused_traces", session.elide_unused_traces),

        {"observer", "weber",
         [](const RunConfig& c) {
             return c.observer.pure_noise ? std::string("inf") : format_number(c.observer.weber_fraction);
         },
         [](RunConfig& c, const std::string& v) {
             const double w = to_double(v);
             c.observer.pure_noise = std::isinf(w);
             c.observer.weber_fraction = std::isinf(w) ? PerceptualModel{}.weber_fraction : w;
         }},
        SB_NUMBER("observer", "lapse", observer.lapse_rate),

        SB_NUMBER("sensor", "f_min", session.feedback.sensor.f_min),
        SB_NUMBER("sensor", "f_max", session.feedback.sensor.f_max),
        {"sensor", "counts_per_newton",
         [](const RunConfig& c) {
             return c.session.auto_counts_per_newton ? std::string("auto")
                                                     : format_number(c.session.feedback.sensor.counts_per_newton);
         },
         [](RunConfig& c, const std::string& v) {
             c.session.auto_counts_per_newton = v == "auto";
             if (v != "auto") c.session.feedback.sensor.counts_per_newton = to_double(v);
         }},
        SB_NUMBER("sensor", "noise_sigma", session.noise.relative_sigma),

        SB_NUMBER("contact", "radius_mm", session.geometry.contact_radius_mm),
        SB_NUMBER("contact", "poisson_ratio", session.geometry.poisson_ratio),
        SB_NUMBER("contact", "oo_indenter_radius_mm", session.geometry.oo_indenter_radius_mm),
        SB_NUMBER("contact", "servo_stiffness", session.servo_stiffness),
        SB_NUMBER("contact", "grasp_variability", session.grasp_variability),

        SB_NUMBER("feedback", "f_leader_max", session.feedback.f_leader_max),
        SB_BOOL("feedback", "clamp_output", session.feedback.clamp_output),
        SB_NUMBER("feedback", "epsilon_mm", session.feedback.epsilon_mm),

        {"device", "mismatch", [](const RunConfig& c) { return std::string(mismatch_kind_name(c.session.device.mismatch.kind)); },
         [](RunConfig& c, const std::string& v) { c.session.device.mismatch.kind = parse_mismatch_kind(v); }},
        SB_NUMBER("device", "knee_leader", session.device.mismatch.knee_leader_fraction),
        SB_NUMBER("device", "knee_follower", session.device.mismatch.knee_follower_fraction),
        SB_NUMBER("device", "thumb_leader_max_mm", session.device.ranges[0].leader_max_mm),
        SB_NUMBER("device", "thumb_follower_max_mm", session.device.ranges[0].follower_max_mm),
        SB_NUMBER("device", "index_leader_max_mm", session.device.ranges[1].leader_max_mm),
        SB_NUMBER("device", "index_follower_max_mm", session.device.ranges[1].follower_max_mm),
        SB_NUMBER("device", "middle_leader_max_mm", session.device.ranges[2].leader_max_mm),
        SB_NUMBER("device", "ring_follower_max_mm", session.device.ranges[2].follower_max_mm),

        SB_NUMBER("squeeze", "duration_s", session.squeeze.duration_s),
        SB_NUMBER("squeeze", "ramp_fraction", session.squeeze.ramp_fraction),
        SB_NUMBER("squeeze", "peak_fraction", session.squeeze.peak_fraction),

        SB_NUMBER("timing", "tick_hz", session.tick_hz),
        SB_NUMBER("timing", "rest_s", session.rest_s),
        SB_NUMBER("timing", "stale_timeout_ms", session.stale_timeout_ms),

        {"transport", "mode", [](const RunConfig& c) { return std::string(transport_mode_name(c.session.transport)); },
         [](RunConfig& c, const std::string& v) { c.session.transport = parse_transport_mode(v); }},
        SB_STRING("transport", "host", session.host),
        {"transport", "port", [](const RunConfig& c) { return std::to_string(c.session.port); },
         [](RunConfig& c, const std::string& v) {
             const auto p = to_u64(v);
             if (p > 65535) throw ConfigError("port out of range");
             c.session.port = static_cast<std::uint16_t>(p);
         }},
        SB_NUMBER("transport", "drop_probability", session.drop_probability),
    };
    return table;
}

#undef SB_NUMBER
#undef SB_BOOL
#undef SB_STRING

const std::vector<std::string>& section_order() {
    static const std::vector<std::string> order = {"run",      "observer", "sensor",  "contact",   "feedback",
                                                   "device",   "squeeze",  "timing",  "transport", "samples"};
    return order;
}

struct SampleLine {
    std::string material;
    ShoreScale scale;
    double value;
};

SampleLine parse_sample_line(const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) parts.push_back(trim(item));
    if (parts.size() != 3) throw ConfigError("sample must be 'material, OO|A, value', got '" + v + "'");
    return {parts[0], parse_scale(parts[1]), to_double(parts[2])};
}

}  // namespace

void RunConfig::validate() const {
    observer.validate();
    session.validate();
    if (participants < 1) throw ConfigError("participants must be at least 1");
    if (participants % 2 != 0) throw ConfigError("participants must be even to counterbalance the groups");
    if (schedule.empty()) throw ConfigError("schedule must be 'table1' or a path");
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig config;
    std::map<std::string, const Key*> index;
    for (const auto& k : keys()) index[k.section + "." + k.name] = &k;
    const std::set<std::string> sections(section_order().begin(), section_order().end());

    std::set<std::string> seen;
    std::map<int, SampleLine> sample_lines;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) throw ConfigError(where() + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
        if (section.empty()) throw ConfigError(where() + "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        if (!seen.insert(full).second) throw ConfigError(where() + "duplicate key " + full);
        try {
            if (section == "samples") {
                if (key.size() != 6 || key.rfind("level", 0) != 0 || key[5] < '1' || key[5] > '5')
                    throw ConfigError("unknown key " + full);
                sample_lines[key[5] - '0'] = parse_sample_line(value);
                continue;
            }
            const auto it = index.find(full);
            if (it == index.end()) throw ConfigError("unknown key " + full);
            it->second->set(config, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where() + e.what());
        } catch (const Error& e) {
            throw ConfigError(where() + full + ": " + e.what());
        }
    }
    if (!sample_lines.empty()) {
        if (sample_lines.size() != 5) throw ConfigError("[samples] must list level1 through level5");
        for (const auto& [level, s] : sample_lines)
            config.session.samples.push_back(
                make_sample(static_cast<SampleLabel>(level), s.material, s.scale, s.value, config.session.geometry));
    }
    try {
        config.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return config;
}

void set_config_value(RunConfig& config, const std::string& section, const std::string& key, const std::string& value) {
    for (const auto& k : keys()) {
        if (k.section == section && k.name == key) {
            try {
                k.set(config, value);
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError(section + "." + key + ": " + e.what());
            }
            return;
        }
    }
    throw ConfigError("unknown key " + section + "." + key);
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string to_ini(const RunConfig& config) {
    std::ostringstream out;
    bool first = true;
    for (const auto& section : section_order()) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        if (section == "samples") {
            for (const auto& s : config.session.sample_set())
                out << "level" << s.stiffness_level() << " = " << s.material << ", " << scale_name(s.shore_scale) << ", "
                    << format_number(s.shore_value) << '\n';
            continue;
        }
        for (const auto& k : keys())
            if (k.section == section) out << k.name << " = " << k.get(config) << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const RunConfig& config) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& k : keys()) j[k.section][k.name] = k.get(config);
    nlohmann::json samples = nlohmann::json::object();
    for (const auto& s : config.session.sample_set())
        samples["level" + std::to_string(s.stiffness_level())] =
            s.material + ", " + std::string(scale_name(s.shore_scale)) + ", " + format_number(s.shore_value);
    j["samples"] = samples;
    return j;
}

}  // namespace stiffbench
