#include "stiffbench/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "stiffbench/error.hpp"
#include "stiffbench/rng.hpp"
#include "stiffbench/session_log.hpp"

namespace stiffbench {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!(out << body)) throw IoError("cannot write " + path.string());
}

}  // namespace

TrialSchedule load_schedule(const std::string& source) {
    if (source == "table1") return schedule_table1();
    return schedule_from_csv(read_file(source));
}

SessionInputs session_inputs(const RunConfig& config) {
    SessionInputs in;
    in.schedule = load_schedule(config.schedule);
    in.method = config.method;
    in.observer = config.observer;
    in.seed = config.seed;
    in.config = config.session;
    in.participant = config.participant;
    in.header_extra = {{"run_config", to_json(config)}};
    return in;
}

namespace {

SessionOutcome run_to_file(const SessionInputs& in, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    SessionLogWriter log(out);
    SessionOutcome outcome = run_session(in, &log);
    out.flush();
    if (!out) throw IoError("error writing " + path.string());
    return outcome;
}

std::string padded_id(int i, int n) {
    const int width = std::max<int>(2, static_cast<int>(std::to_string(n).size()));
    std::string digits = std::to_string(i);
    return "P" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

}  // namespace

SessionOutcome cmd_run(const RunConfig& config) {
    config.validate();
    return run_to_file(session_inputs(config), config.out);
}

std::vector<BatchSession> plan_batch(const RunConfig& config) {
    config.validate();
    std::vector<BatchSession> plan;
    const int n = config.participants;
    for (int i = 1; i <= n; ++i) {
        const std::string id = padded_id(i, n);
        const int group = i <= n / 2 ? 1 : 2;
        for (int day = 1; day <= 2; ++day) {
            // Group 1 starts with Method I, group 2 with Method II; they swap on day 2.
            const int method = (group == 1) == (day == 1) ? 1 : 2;
            for (Task task : config.session.tasks) {
                BatchSession s;
                s.meta = {id, group, day, method};
                s.task = task;
                const std::string tag = id + "_day" + std::to_string(day) + "_" + std::string(task_name(task));
                s.seed = derive_seed(config.seed, tag);
                s.path = std::filesystem::path(config.out_dir) / (tag + ".jsonl");
                plan.push_back(std::move(s));
            }
        }
    }
    return plan;
}

std::vector<BatchSession> cmd_batch(const RunConfig& config, unsigned jobs) {
    const auto plan = plan_batch(config);
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create " + config.out_dir + ": " + ec.message());

    const TrialSchedule schedule = load_schedule(config.schedule);
    auto run_one = [&](const BatchSession& s) {
        RunConfig rc = config;
        rc.seed = s.seed;
        rc.method = s.meta.method == 1 ? FeedbackMethod::Force : FeedbackMethod::ForceDisplacement;
        rc.participant = s.meta.id;
        rc.session.tasks = {s.task};
        rc.out = s.path.string();
        SessionInputs in = session_inputs(rc);
        in.schedule = schedule;
        in.group = s.meta.group;
        in.day = s.meta.day;
        run_to_file(in, s.path);
    };

    // A fixed follower port cannot be shared by concurrent sessions.
    if (config.session.transport == TransportMode::Datagram && config.session.port != 0) jobs = 1;
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
    if (jobs == 1) {
        for (const auto& s : plan) run_one(s);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex m;
        std::exception_ptr failure;
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < plan.size(); i = next++) {
                    try {
                        run_one(plan[i]);
                    } catch (...) {
                        std::lock_guard lock(m);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<ParticipantMeta> meta;
    for (const auto& s : plan) {
        const bool seen = std::any_of(meta.begin(), meta.end(),
                                      [&](const ParticipantMeta& m) { return m.id == s.meta.id && m.day == s.meta.day; });
        if (!seen) meta.push_back(s.meta);
    }
    write_file(std::filesystem::path(config.out_dir) / "metadata.csv", metadata_to_csv(meta));
    return plan;
}

int cmd_validate_schedule(const std::filesystem::path& path, std::ostream& report) {
    const std::string text = read_file(path);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        report << "schedule file " << path.string() << " is empty\n";
        return kExitUsage;
    }
    TrialSchedule schedule;
    try {
        schedule = schedule_from_csv(text);
    } catch (const InvalidArgument& e) {
        report << "malformed schedule: " << e.what() << '\n';
        return kExitValidation;
    }
    const ValidationReport r = validate_schedule(schedule);
    report << r.to_string();
    return r.passed() ? kExitOk : kExitValidation;
}

std::vector<std::filesystem::path> expand_log_paths(const std::vector<std::filesystem::path>& inputs) {
    std::vector<std::filesystem::path> out;
    for (const auto& p : inputs) {
        if (std::filesystem::is_directory(p)) {
            std::vector<std::filesystem::path> found;
            for (const auto& e : std::filesystem::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".jsonl") found.push_back(e.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (std::filesystem::exists(p)) {
            out.push_back(p);
        } else {
            throw IoError("no such file or directory: " + p.string());
        }
    }
    if (out.empty()) throw MalformedLog("no session logs found");
    return out;
}

std::vector<std::filesystem::path> cmd_analyze(const std::vector<std::filesystem::path>& logs,
                                               const std::filesystem::path& metadata,
                                               const std::filesystem::path& out_dir) {
    std::vector<ParticipantMeta> meta;
    if (!metadata.empty()) meta = parse_metadata_csv(read_file(metadata));
    std::vector<SuccessRecord> records;
    for (const auto& path : expand_log_paths(logs)) {
        try {
            auto r = records_from_log(read_session_log_file(path), metadata.empty() ? nullptr : &meta);
            records.insert(records.end(), r.begin(), r.end());
        } catch (const MalformedLog& e) {
            throw MalformedLog(path.string() + ": " + e.what());
        }
    }
    return write_reports(records, out_dir);
}

std::string catalog_csv(const SessionConfig& config) {
    std::ostringstream out;
    out << "level,label,material,scale,shore,youngs_modulus_mpa,stiffness_n_per_mm\n";
    for (const auto& s : config.sample_set())
        out << s.stiffness_level() << ',' << label_name(s.label) << ',' << s.material << ',' << scale_name(s.shore_scale)
            << ',' << format_number(s.shore_value) << ',' << format_number(s.youngs_modulus_mpa) << ','
            << format_number(s.stiffness) << '\n';
    return out.str();
}

}  // namespace stiffbench
