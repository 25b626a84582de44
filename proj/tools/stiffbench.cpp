// stiffbench command-line front end.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stiffbench/commands.hpp"
#include "stiffbench/error.hpp"

using namespace stiffbench;

namespace {

// Flags that override the config file; unset ones leave it alone.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;
    std::optional<std::string> schedule;
    std::optional<std::string> weber;
    std::optional<double> lapse;
    std::optional<std::string> tasks;
    std::optional<std::string> transport;
    std::optional<std::string> host;
    std::optional<std::uint16_t> port;
    std::optional<double> drop;
    std::optional<std::string> log_detail;
    bool no_practice = false;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--seed", seed, "Session seed");
        cmd.add_option("--method", method, "Feedback method (1 or 2)")->check(CLI::IsMember({"1", "2"}));
        cmd.add_option("--schedule", schedule, "table1 or a schedule CSV");
        cmd.add_option("--observer-weber", weber, "Observer Weber fraction; inf for a pure-noise observer");
        cmd.add_option("--observer-lapse", lapse, "Observer lapse rate");
        cmd.add_option("--tasks", tasks, "Comma-separated tasks (ABX,S)");
        cmd.add_option("--transport", transport, "inprocess or udp")->check(CLI::IsMember({"inprocess", "udp"}));
        cmd.add_option("--host", host, "Follower host for udp transport");
        cmd.add_option("--port", port, "Follower port for udp transport (0 = ephemeral)");
        cmd.add_option("--drop-probability", drop, "Per-message drop probability");
        cmd.add_option("--log-detail", log_detail, "summary or full")->check(CLI::IsMember({"summary", "full"}));
        cmd.add_flag("--no-practice", no_practice, "Skip the practice trials");
    }

    void apply(RunConfig& c) const {
        if (seed) set_config_value(c, "run", "seed", std::to_string(*seed));
        if (method) set_config_value(c, "run", "method", *method);
        if (schedule) set_config_value(c, "run", "schedule", *schedule);
        if (tasks) set_config_value(c, "run", "tasks", *tasks);
        if (log_detail) set_config_value(c, "run", "log_detail", *log_detail);
        if (no_practice) set_config_value(c, "run", "practice", "false");
        if (weber) set_config_value(c, "observer", "weber", *weber);
        if (lapse) set_config_value(c, "observer", "lapse", format_number(*lapse));
        if (transport) set_config_value(c, "transport", "mode", *transport);
        if (host) set_config_value(c, "transport", "host", *host);
        if (port) set_config_value(c, "transport", "port", std::to_string(*port));
        if (drop) set_config_value(c, "transport", "drop_probability", format_number(*drop));
    }
};

RunConfig build_config(const std::string& path, const Overrides& o,
                       const std::vector<std::pair<std::string, std::string>>& run_extra) {
    RunConfig cfg = path.empty() ? RunConfig{} : load_run_config(path);
    o.apply(cfg);
    for (const auto& [k, v] : run_extra) set_config_value(cfg, "run", k, v);
    try {
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

int report_error(const std::exception& e, int code) {
    std::cerr << "stiffbench: " << e.what() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Haptic stiffness-discrimination study simulator and analysis toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "stiffbench 0.3.0");

    // run
    auto* run = app.add_subcommand("run", "Run one simulated session and write its log");
    std::string run_config, run_out, run_participant;
    Overrides run_over;
    run->add_option("--config", run_config, "Run configuration file")->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Session log path (JSONL)");
    run->add_option("--participant", run_participant, "Participant id written to the log header");
    run_over.add_to(*run);

    // batch
    auto* batch = app.add_subcommand("batch", "Run a counterbalanced batch: participants x 2 days x tasks");
    std::string batch_config, batch_out;
    std::optional<int> batch_n;
    unsigned jobs = 1;
    Overrides batch_over;
    batch->add_option("--config", batch_config, "Run configuration file")->check(CLI::ExistingFile);
    batch->add_option("--out-dir", batch_out, "Directory for session logs and metadata.csv");
    batch->add_option("--participants", batch_n, "Number of participants (even)")->check(CLI::PositiveNumber);
    batch->add_option("--jobs", jobs, "Sessions run concurrently")->check(CLI::PositiveNumber);
    batch_over.add_to(*batch);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Score session logs and write the statistics reports");
    std::vector<std::string> logs;
    std::string metadata, report_dir = "reports";
    analyze->add_option("logs", logs, "Session logs or directories of them")->required();
    analyze->add_option("--metadata", metadata, "Participant metadata CSV (id,group,day,method)");
    analyze->add_option("--out", report_dir, "Report directory");

    // validate-schedule
    auto* validate = app.add_subcommand("validate-schedule", "Check a schedule CSV against the design rules");
    std::string validate_path;
    validate->add_option("path", validate_path, "Schedule CSV")->required();

    // export-schedule
    auto* exporter = app.add_subcommand("export-schedule", "Write the built-in schedule as CSV");
    std::string export_out;
    exporter->add_option("--out", export_out, "Output path (default stdout)");

    // catalog
    auto* cat = app.add_subcommand("catalog", "Print the sample stiffness table as CSV");
    std::string cat_config;
    cat->add_option("--config", cat_config, "Run configuration file")->check(CLI::ExistingFile);

    // config
    auto* show = app.add_subcommand("config", "Print the effective run configuration");
    std::string show_config;
    show->add_option("--config", show_config, "Run configuration file")->check(CLI::ExistingFile);
    bool show_json = false;
    show->add_flag("--json", show_json, "Print JSON instead of the key/value format");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) {
            std::vector<std::pair<std::string, std::string>> extra;
            if (!run_out.empty()) extra.emplace_back("out", run_out);
            if (!run_participant.empty()) extra.emplace_back("participant", run_participant);
            const RunConfig cfg = build_config(run_config, run_over, extra);
            const SessionOutcome outcome = cmd_run(cfg);
            for (Task t : cfg.session.tasks) {
                const auto s = scored(outcome.results, t);
                const auto ok = std::count_if(s.begin(), s.end(), [](const TrialResult& r) { return r.correct; });
                std::cout << task_name(t) << ": " << ok << "/" << s.size() << " correct\n";
            }
            std::cout << "wrote " << cfg.out << '\n';
            return kExitOk;
        }
        if (*batch) {
            std::vector<std::pair<std::string, std::string>> extra;
            if (!batch_out.empty()) extra.emplace_back("out_dir", batch_out);
            if (batch_n) extra.emplace_back("participants", std::to_string(*batch_n));
            const RunConfig cfg = build_config(batch_config, batch_over, extra);
            const auto sessions = cmd_batch(cfg, jobs);
            std::cout << "wrote " << sessions.size() << " session logs and metadata.csv to " << cfg.out_dir << '\n';
            return kExitOk;
        }
        if (*analyze) {
            std::vector<std::filesystem::path> paths(logs.begin(), logs.end());
            for (const auto& p : cmd_analyze(paths, metadata, report_dir)) std::cout << "wrote " << p.string() << '\n';
            return kExitOk;
        }
        if (*validate) return cmd_validate_schedule(validate_path, std::cout);
        if (*exporter) {
            const std::string csv = schedule_to_csv(schedule_table1());
            if (export_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream f(export_out, std::ios::binary);
                if (!(f << csv)) throw IoError("cannot write " + export_out);
            }
            return kExitOk;
        }
        if (*cat) {
            const RunConfig cfg = cat_config.empty() ? RunConfig{} : load_run_config(cat_config);
            std::cout << catalog_csv(cfg.session);
            return kExitOk;
        }
        if (*show) {
            const RunConfig cfg = show_config.empty() ? RunConfig{} : load_run_config(show_config);
            if (show_json)
                std::cout << to_json(cfg).dump(2) << '\n';
            else
                std::cout << to_ini(cfg);
            return kExitOk;
        }
    } catch (const IoError& e) {
        return report_error(e, kExitIo);
    } catch (const ConfigError& e) {
        return report_error(e, kExitUsage);
    } catch (const MalformedLog& e) {
        return report_error(e, kExitValidation);
    } catch (const Error& e) {
        return report_error(e, kExitValidation);
    }
    return kExitUsage;
}
