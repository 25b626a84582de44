#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stiffbench {

enum class Task : std::uint8_t { ABX, S };
enum class Direction : std::uint8_t { Harder, Softer };

std::string_view task_name(Task t);
Task parse_task(std::string_view text);
std::string_view direction_symbol(Direction d);

/// One row of the test sequence. Levels are catalog stiffness levels 1..5.
///
/// For ABX, x equals a or b. `direction` says whether the stimulus that does
/// not match x is harder or softer than x.
struct Trial {
    int index = 0;
    int a = 0;
    int b = 0;
    int x = 0;
    int distance = 0;
    Direction direction = Direction::Harder;
    Task task = Task::ABX;
    bool practice = false;

    /// Level of the stimulus that does not match x.
    [[nodiscard]] int non_match() const { return a == x ? b : a; }

    friend bool operator==(const Trial&, const Trial&) = default;
};

struct TrialSchedule {
    std::vector<Trial> trials;

    static constexpr std::array<int, 2> kRestAfter{8, 16};
};

/// One of the eight designated stimulus pairs; (first, second) is unordered.
struct DesignatedPair {
    int first = 0;
    int second = 0;
    int x = 0;
    int distance = 0;

    [[nodiscard]] std::string name() const;
};

std::span<const DesignatedPair> designated_pairs();

/// Index into designated_pairs() for a trial's {a, b} and x, if any.
std::optional<std::size_t> pair_index(int a, int b, int x);

/// The 24-test ABX sequence.
TrialSchedule schedule_table1();

/// Same rows, relabelled for another task.
TrialSchedule with_task(TrialSchedule schedule, Task task);

/// Unscored warm-up trials run before the scored ones.
std::vector<Trial> practice_trials(Task task);

struct Violation {
    std::string code;
    int trial = 0;  ///< 1-based; 0 when the violation is schedule-wide
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::map<int, int> distance_counts;
    std::vector<int> pair_counts;  ///< parallel to designated_pairs()

    [[nodiscard]] bool passed() const { return violations.empty(); }
    [[nodiscard]] bool has(std::string_view code) const;
    [[nodiscard]] std::string to_string() const;
};

/// Checks length, per-row consistency, designated-pair membership, the
/// distance and pair balance, and the repeat/swap block structure.
ValidationReport validate_schedule(const TrialSchedule& schedule);

/// Within-trial presentation order. The stimuli labelled A and B are
/// presented in the order given; X (ABX only) always comes last.
struct Presentation {
    int trial_index = 0;
    bool b_first = false;

    friend bool operator==(const Presentation&, const Presentation&) = default;
};

std::vector<Presentation> randomize_presentation(const TrialSchedule& schedule, std::uint64_t seed);

/// Row-per-field CSV in the layout of the printed sequence table:
///   Test,1,...,24 / A,... / B,... / X,... / D,... / Dir,↑/↓...
std::string schedule_to_csv(const TrialSchedule& schedule);

/// Parses schedule_to_csv output; also accepts "up"/"down" directions.
/// Throws InvalidArgument on structural problems (empty input, ragged rows,
/// non-numeric cells). Content problems are left to validate_schedule.
TrialSchedule schedule_from_csv(std::string_view csv);

}  // namespace stiffbench
