#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stiffbench/experiment.hpp"
#include "stiffbench/session_log.hpp"
#include "stiffbench/stats.hpp"

namespace stiffbench {

/// One row of the participant metadata file: id,group,day,method.
struct ParticipantMeta {
    std::string id;
    int group = 0;
    int day = 0;
    int method = 0;
};

std::vector<ParticipantMeta> parse_metadata_csv(std::string_view csv);
std::string metadata_to_csv(const std::vector<ParticipantMeta>& rows);

/// Scored outcome of one task in one session.
struct SuccessRecord {
    std::string participant;
    int group = 0;
    int day = 0;
    int method = 0;
    Task task = Task::ABX;
    std::vector<bool> correct;  ///< scored trials in schedule order
    std::array<int, 8> pair_correct{};
    std::array<int, 8> pair_total{};
    std::array<int, 5> distance_correct{};  ///< indexed by D, slot 0 unused
    std::array<int, 5> distance_total{};

    [[nodiscard]] int successes() const;
    /// Percent correct.
    [[nodiscard]] double success_rate() const;
    [[nodiscard]] double pair_rate(std::size_t pair) const;
    [[nodiscard]] double distance_rate(int d) const;

    /// Appends one scored trial and updates the tallies.
    void add(int pair, int distance, bool ok);
};

/// Scored records of a session log, one per task it contains. Group, day
/// and method come from the metadata row matching (participant, day) when
/// `metadata` is given, and are cross-checked against the header.
/// Throws MalformedLog on aborted or truncated sessions.
std::vector<SuccessRecord> records_from_log(const SessionLog& log, const std::vector<ParticipantMeta>* metadata = nullptr);

struct SummaryRow {
    Task task = Task::ABX;
    int method = 1;
    stats::Summary summary;
};

/// Mean, population variance and SD of success rates for one (task, method).
stats::Summary success_summary(const std::vector<SuccessRecord>& records, Task task, int method);
/// Every (task, method) present, ABX before S, method 1 before 2.
std::vector<SummaryRow> summary_table(const std::vector<SuccessRecord>& records);

/// Group x Day x Task ANOVA (mains plus pairwise interactions) on
/// per-record success rates.
stats::AnovaTable success_anova(const std::vector<SuccessRecord>& records);
/// The same model on the eight cell means, which leaves one residual df.
stats::AnovaTable success_anova_cells(const std::vector<SuccessRecord>& records);

inline constexpr double kSignificance = 0.05;

/// Method I vs Method II on one slice (a pair, a distance, or the whole task).
struct Comparison {
    Task task = Task::ABX;
    std::string scope;  ///< "pair", "distance" or "task"
    std::string label;
    int pair = -1;
    int distance = 0;
    double mean_method1 = 0.0;
    double mean_method2 = 0.0;
    stats::TestResult test;
    [[nodiscard]] bool significant() const { return test.p_value < kSignificance; }
};

struct PairwiseReport {
    std::vector<Comparison> pairs;      ///< 8 per task
    std::vector<Comparison> distances;  ///< D = 1..4 per task
    std::vector<Comparison> tasks;      ///< whole-task comparison per task
};

/// Throws InvalidArgument when a task lacks sessions under either method.
PairwiseReport pairwise_report(const std::vector<SuccessRecord>& records);

/// Normality per (task, method) and variance homogeneity per task.
struct AssumptionRow {
    std::string test;   ///< "shapiro_wilk", "levene_mean", "levene_median"
    Task task = Task::ABX;
    int method = 0;     ///< 0 when the test spans both methods
    std::optional<stats::TestResult> result;  ///< empty on a degenerate sample
    std::string note;
};

std::vector<AssumptionRow> assumption_checks(const std::vector<SuccessRecord>& records);

// Report files. Numbers print with up to ten significant digits; NaN as NA.
std::string format_stat(double v);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string anova_csv(const stats::AnovaTable& table);
std::string nonparametric_csv(const std::vector<AssumptionRow>& checks, const PairwiseReport& report);
std::string spider_csv(const PairwiseReport& report);
nlohmann::json spider_json(const PairwiseReport& report);

/// Writes summary.csv, anova.csv, anova_cells.csv, nonparametric.csv,
/// spider.csv and spider.json into `dir`. Returns the paths written.
std::vector<std::filesystem::path> write_reports(const std::vector<SuccessRecord>& records,
                                                 const std::filesystem::path& dir);

/// Human-participant findings, shipped for documentation only. Nothing in
/// this artifact is expected to reproduce them.
namespace reference {

struct SuccessRateRow {
    std::string_view task;
    int method;
    double mean_percent;
    double variance;
    double sd;
};
inline constexpr std::array<SuccessRateRow, 4> kSuccessRates{{
    {"ABX", 1, 74.16, 64.83, 8.05},
    {"ABX", 2, 74.58, 21.04, 4.59},
    {"S", 1, 67.91, 81.20, 9.01},
    {"S", 2, 64.58, 159.14, 12.62},
}};

struct AnovaReferenceRow {
    std::string_view source;
    double ss;
    double f;
    double p;
};
inline constexpr std::array<AnovaReferenceRow, 6> kAnova{{
    {"Group", 10.47, 1.48, 0.437},
    {"Day", 94.60, 13.42, 0.170},
    {"Task", 132.11, 18.74, 0.145},
    {"Group:Day", 4.25, 0.60, 0.580},
    {"Group:Task", 94.60, 13.42, 0.170},
    {"Day:Task", 4.25, 0.60, 0.580},
}};
inline constexpr double kAnovaResidualSS = 7.05;

/// Method comparison on pair (1-US, 4-LH) in task S.
inline constexpr double kPairUsLhTaskSP = 0.048;

struct DayChange {
    int group;
    std::string_view task;
    double day1;
    double day2;
};
inline constexpr std::array<DayChange, 4> kDayImprovement{{
    {1, "ABX", 69.16, 75.00},
    {1, "S", 68.33, 73.33},
    {2, "ABX", 74.17, 79.17},
    {2, "S", 55.83, 67.50},
}};

}  // namespace reference

}  // namespace stiffbench
