#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "stiffbench/feedback.hpp"
#include "stiffbench/observer.hpp"
#include "stiffbench/session.hpp"

namespace stiffbench {

/// Everything a run needs. Serializes to the same sectioned key/value text
/// it is read from, and to JSON for the log header.
///
/// Sections and keys:
///
///   [run]        seed, method (1|2), schedule (table1|PATH), out, out_dir,
///                participant, participants, tasks (ABX,S), practice,
///                log_detail (summary|full), elide_unused_traces
///   [observer]   weber (number, or inf for pure noise), lapse
///   [sensor]     f_min, f_max, counts_per_newton (number|auto), noise_sigma
///   [contact]    radius_mm, poisson_ratio, oo_indenter_radius_mm,
///                servo_stiffness, grasp_variability
///   [feedback]   f_leader_max, clamp_output, epsilon_mm
///   [device]     mismatch (linear|piecewise), knee_leader, knee_follower,
///                thumb_leader_max_mm, thumb_follower_max_mm,
///                index_leader_max_mm, index_follower_max_mm,
///                middle_leader_max_mm, ring_follower_max_mm
///   [squeeze]    duration_s, ramp_fraction, peak_fraction
///   [timing]     tick_hz, rest_s, stale_timeout_ms
///   [transport]  mode (inprocess|udp), host, port, drop_probability
///   [samples]    level1 .. level5 = material, OO|A, shore value
///
/// Lines starting with '#' or ';' are comments. Unknown sections, unknown
/// keys, duplicate keys and malformed values raise ConfigError.
struct RunConfig {
    std::uint64_t seed = 1;
    FeedbackMethod method = FeedbackMethod::Force;
    PerceptualModel observer{};
    SessionConfig session{};
    std::string schedule = "table1";
    std::string out = "session.jsonl";
    std::string out_dir = "sessions";
    std::string participant = "P01";
    int participants = 10;

    void validate() const;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Sets one key as if it appeared in the file. Does not validate the whole
/// config; call validate() after the last change.
void set_config_value(RunConfig& config, const std::string& section, const std::string& key, const std::string& value);

std::string to_ini(const RunConfig& config);
nlohmann::json to_json(const RunConfig& config);

/// Shortest text that parses back to the same double.
std::string format_number(double value);

}  // namespace stiffbench
