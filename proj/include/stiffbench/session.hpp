#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stiffbench/experiment.hpp"
#include "stiffbench/feedback.hpp"
#include "stiffbench/observer.hpp"
#include "stiffbench/retargeting.hpp"
#include "stiffbench/session_log.hpp"
#include "stiffbench/soft_world.hpp"

namespace stiffbench {

/// Leader displacement during one presentation: a trapezoid that rises over
/// ramp_fraction of the duration, holds at peak_fraction of the finger's
/// range, and falls back over the final ramp_fraction.
struct SqueezeProfile {
    double duration_s = 10.0;
    double ramp_fraction = 0.3;
    double peak_fraction = 0.9;

    void validate() const;
    /// Shape in [0, 1] at tick i of n.
    [[nodiscard]] double shape(std::size_t i, std::size_t n) const;
};

enum class TransportMode : std::uint8_t { InProcess, Datagram };
enum class LogDetail : std::uint8_t { Summary, Full };

std::string_view transport_mode_name(TransportMode m);
TransportMode parse_transport_mode(std::string_view text);
std::string_view log_detail_name(LogDetail d);
LogDetail parse_log_detail(std::string_view text);

struct SessionConfig {
    ContactGeometry geometry{};
    NoiseModel noise{};
    FeedbackConfig feedback{};
    DeviceProfile device{};
    SqueezeProfile squeeze{};
    /// Follower fingertip position-servo stiffness (N/mm). The fingertip
    /// and the sample act as springs in series.
    double servo_stiffness = 2.0;
    /// Each presentation lands the fingertip differently on the sample. The
    /// effective contact radius, and with it the contact stiffness, is
    /// scaled by exp(grasp_variability * n), n a standard normal truncated
    /// to [-2, 2] and drawn once per squeeze.
    double grasp_variability = 0.5;
    /// When set, counts_per_newton is derived so the strongest taxel reads
    /// f_max at the deepest full squeeze of the stiffest sample.
    bool auto_counts_per_newton = true;
    /// Empty means the built-in catalog under `geometry`.
    std::vector<SampleSpec> samples;

    double tick_hz = 100.0;
    double rest_s = 60.0;
    std::vector<Task> tasks{Task::ABX, Task::S};
    bool practice = true;

    TransportMode transport = TransportMode::InProcess;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  ///< follower port; 0 picks an ephemeral one
    double drop_probability = 0.0;
    double stale_timeout_ms = 50.0;

    LogDetail log_detail = LogDetail::Summary;
    /// A pure-noise observer never reads the traces, so with a summary log
    /// the tick loop can be skipped without changing any answer.
    bool elide_unused_traces = true;

    void validate() const;
    /// Config with counts_per_newton resolved when auto_counts_per_newton is set.
    [[nodiscard]] SessionConfig resolved() const;
    [[nodiscard]] std::vector<SampleSpec> sample_set() const;
    [[nodiscard]] std::size_t ticks_per_squeeze() const;
    [[nodiscard]] std::uint64_t stale_timeout_ticks() const;
};

nlohmann::json to_json(const SessionConfig& config);

/// Deepest follower compression reached by a full squeeze of `sample`.
double full_squeeze_depth(const SampleSpec& sample, const SessionConfig& config);

/// One squeeze of one stimulus.
struct PhaseTrace {
    char role = 'A';  ///< 'A', 'B' or 'X'
    int level = 0;
    std::uint64_t first_tick = 0;
    std::uint64_t last_tick = 0;
    double percept = 0.0;
    std::size_t gated_ticks = 0;
    std::size_t stale_ticks = 0;
    double mean_k_hat = 0.0;  ///< counts/mm over ticks with an estimate
    double contact_scale = 1.0;
    bool simulated = true;
};

struct TrialResult {
    Trial trial;
    bool b_first = false;
    Choice answered = Choice::A;
    bool correct = false;
    std::vector<PhaseTrace> phases;

    friend bool operator==(const TrialResult& l, const TrialResult& r) {
        return l.trial == r.trial && l.b_first == r.b_first && l.answered == r.answered && l.correct == r.correct;
    }
};

/// Ground truth: ABX is correct when the answered stimulus has X's level,
/// S when the answered stimulus is strictly softer than the other.
bool score_answer(const Trial& trial, Choice answered);

struct SessionInputs {
    TrialSchedule schedule = schedule_table1();
    FeedbackMethod method = FeedbackMethod::Force;
    PerceptualModel observer{};
    std::uint64_t seed = 0;
    SessionConfig config{};
    std::string participant = "P01";
    int group = 0;  ///< 0 when not part of a counterbalanced batch
    int day = 0;
    /// Merged into the log header (e.g. the full run configuration).
    nlohmann::json header_extra = nlohmann::json::object();
};

struct SessionOutcome {
    std::vector<TrialResult> results;  ///< practice trials included, flagged
    std::uint64_t ticks = 0;
    std::uint64_t dropped_messages = 0;
};

/// Runs every configured task over the schedule. When `log` is given the
/// header and records are written to it. An observer failure writes an
/// abort record, flushes, and throws SessionAborted.
SessionOutcome run_session(const SessionInputs& inputs, SessionLogWriter* log = nullptr);

/// Scored (non-practice) results of one task.
std::vector<TrialResult> scored(const std::vector<TrialResult>& results, Task task);

}  // namespace stiffbench
