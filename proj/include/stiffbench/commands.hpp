#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stiffbench/analysis.hpp"
#include "stiffbench/config.hpp"
#include "stiffbench/experiment.hpp"
#include "stiffbench/session.hpp"

namespace stiffbench {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitUsage = 2, kExitIo = 3 };

/// "table1" (the built-in sequence) or a path to a schedule CSV.
TrialSchedule load_schedule(const std::string& source);

/// Session inputs for one run of `config`.
SessionInputs session_inputs(const RunConfig& config);

/// Runs one session and writes its log to config.out.
SessionOutcome cmd_run(const RunConfig& config);

struct BatchSession {
    ParticipantMeta meta;
    Task task = Task::ABX;
    std::uint64_t seed = 0;
    std::filesystem::path path;
};

/// The sessions a batch of config.participants would run: each participant
/// x day x task, the first half of the participants on Method I first.
std::vector<BatchSession> plan_batch(const RunConfig& config);

/// Runs the plan (up to `jobs` sessions at once) and writes metadata.csv
/// next to the session files.
std::vector<BatchSession> cmd_batch(const RunConfig& config, unsigned jobs = 1);

/// Prints the validation report; returns kExitOk or kExitValidation.
/// An empty file is a usage error.
int cmd_validate_schedule(const std::filesystem::path& path, std::ostream& report);

/// Session logs named directly or found (*.jsonl) in a directory, sorted.
std::vector<std::filesystem::path> expand_log_paths(const std::vector<std::filesystem::path>& inputs);

/// Reads logs (and the optional metadata file) and writes the report set.
std::vector<std::filesystem::path> cmd_analyze(const std::vector<std::filesystem::path>& logs,
                                               const std::filesystem::path& metadata,
                                               const std::filesystem::path& out_dir);

/// Stiffness fixture CSV of the configured sample set.
std::string catalog_csv(const SessionConfig& config);

}  // namespace stiffbench
