#include "stiffbench/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "stiffbench/error.hpp"
#include "stiffbench/rng.hpp"

namespace stiffbench {

std::string_view task_name(Task t) { return t == Task::ABX ? "ABX" : "S"; }

Task parse_task(std::string_view text) {
    if (text == "ABX" || text == "abx") return Task::ABX;
    if (text == "S" || text == "s") return Task::S;
    throw InvalidArgument("unknown task '" + std::string(text) + "'");
}

std::string_view direction_symbol(Direction d) { return d == Direction::Harder ? "↑" : "↓"; }

std::string DesignatedPair::name() const {
    static constexpr std::array<std::string_view, 6> labels{"", "1-US", "2-S", "3-M", "4-LH", "5-H"};
    std::string out = "(";
    out += labels[first];
    out += ",";
    out += labels[second];
    out += "|X=";
    out += std::to_string(x);
    out += ")";
    return out;
}

std::span<const DesignatedPair> designated_pairs() {
    static constexpr std::array<DesignatedPair, 8> pairs{{
        {1, 2, 1, 1},
        {3, 4, 3, 1},
        {1, 3, 3, 2},
        {3, 5, 5, 2},
        {1, 4, 1, 3},
        {2, 5, 5, 3},
        {1, 5, 1, 4},
        {5, 1, 5, 4},
    }};
    return pairs;
}

std::optional<std::size_t> pair_index(int a, int b, int x) {
    const auto pairs = designated_pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        const bool same = (p.first == a && p.second == b) || (p.first == b && p.second == a);
        if (same && p.x == x) return i;
    }
    return std::nullopt;
}

namespace {

Trial make_trial(int index, int a, int b, int x, Task task = Task::ABX) {
    Trial t;
    t.index = index;
    t.a = a;
    t.b = b;
    t.x = x;
    t.distance = std::abs(a - b);
    t.direction = t.non_match() > x ? Direction::Harder : Direction::Softer;
    t.task = task;
    return t;
}

}  // namespace

TrialSchedule schedule_table1() {
    static constexpr std::array<int, 24> a{1, 2, 4, 3, 5, 2, 1, 3, 5, 5, 3, 1, 1, 1, 4, 5, 1, 2, 4, 3, 5, 2, 1, 3};
    static constexpr std::array<int, 24> b{5, 5, 3, 1, 1, 1, 4, 5, 1, 2, 4, 3, 5, 2, 1, 3, 5, 5, 3, 1, 1, 1, 4, 5};
    static constexpr std::array<int, 24> x{1, 5, 3, 3, 5, 1, 1, 5, 1, 5, 3, 3, 5, 1, 1, 5, 1, 5, 3, 3, 5, 1, 1, 5};
    static constexpr std::array<int, 24> d{4, 3, 1, 2, 4, 1, 3, 2, 4, 3, 1, 2, 4, 1, 3, 2, 4, 3, 1, 2, 4, 1, 3, 2};
    static constexpr std::array<bool, 24> up{true, false, true,  false, false, true, true,  false,
                                             true, false, true,  false, false, true, true,  false,
                                             true, false, true,  false, false, true, true,  false};
    TrialSchedule s;
    for (std::size_t i = 0; i < 24; ++i) {
        Trial t;
        t.index = static_cast<int>(i) + 1;
        t.a = a[i];
        t.b = b[i];
        t.x = x[i];
        t.distance = d[i];
        t.direction = up[i] ? Direction::Harder : Direction::Softer;
        s.trials.push_back(t);
    }
    return s;
}

TrialSchedule with_task(TrialSchedule schedule, Task task) {
    for (auto& t : schedule.trials) t.task = task;
    return schedule;
}

std::vector<Trial> practice_trials(Task task) {
    Trial first = make_trial(1, 1, 3, 1, task);
    Trial second = make_trial(2, 5, 3, 3, task);
    first.practice = second.practice = true;
    return {first, second};
}

bool ValidationReport::has(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::to_string() const {
    if (passed()) return "schedule OK\n";
    std::ostringstream out;
    for (const auto& v : violations) {
        out << v.code;
        if (v.trial > 0) out << " (trial " << v.trial << ")";
        out << ": " << v.detail << '\n';
    }
    return out.str();
}

ValidationReport validate_schedule(const TrialSchedule& schedule) {
    ValidationReport report;
    const auto pairs = designated_pairs();
    report.pair_counts.assign(pairs.size(), 0);
    auto add = [&](std::string code, int trial, std::string detail) {
        report.violations.push_back({std::move(code), trial, std::move(detail)});
    };

    const auto& trials = schedule.trials;
    if (trials.size() != 24) add("length", 0, "expected 24 trials, got " + std::to_string(trials.size()));

    for (std::size_t i = 0; i < trials.size(); ++i) {
        const Trial& t = trials[i];
        const int n = static_cast<int>(i) + 1;
        if (t.index != n) add("index", n, "trial index " + std::to_string(t.index) + " out of sequence");
        const bool levels_ok = t.a >= 1 && t.a <= 5 && t.b >= 1 && t.b <= 5 && t.x >= 1 && t.x <= 5;
        if (!levels_ok) {
            add("level", n, "stiffness levels must lie in 1..5");
            continue;
        }
        if (t.x != 1 && t.x != 3 && t.x != 5) add("x-level", n, "X must be 1, 3 or 5");
        if (t.x != t.a && t.x != t.b) add("x-membership", n, "X matches neither A nor B");
        if (t.a == t.b) add("identical-pair", n, "A and B are the same level");
        if (t.distance != std::abs(t.a - t.b))
            add("distance", n, "D=" + std::to_string(t.distance) + " but |A-B|=" + std::to_string(std::abs(t.a - t.b)));
        if (t.x == t.a || t.x == t.b) {
            const Direction expect = t.non_match() > t.x ? Direction::Harder : Direction::Softer;
            if (t.direction != expect) add("direction", n, "direction arrow disagrees with levels");
        }
        if (const auto p = pair_index(t.a, t.b, t.x)) {
            ++report.pair_counts[*p];
        } else {
            add("pair-membership", n, "(A,B|X) is not a designated pair");
        }
        ++report.distance_counts[t.distance];
    }

    if (trials.size() == 24) {
        for (int d = 1; d <= 4; ++d) {
            const int c = report.distance_counts.count(d) ? report.distance_counts.at(d) : 0;
            if (c != 6) add("distance-balance", 0, "D=" + std::to_string(d) + " appears " + std::to_string(c) + " times, expected 6");
        }
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            if (report.pair_counts[p] != 3)
                add("pair-balance", 0, pairs[p].name() + " appears " + std::to_string(report.pair_counts[p]) + " times, expected 3");
        }
        for (std::size_t i = 0; i < 8; ++i) {
            const Trial& first = trials[i];
            const Trial& swapped = trials[i + 8];
            const Trial& repeat = trials[i + 16];
            const int n_swap = static_cast<int>(i) + 9;
            const int n_rep = static_cast<int>(i) + 17;
            if (swapped.a != first.b || swapped.b != first.a || swapped.x != first.x)
                add("block-swap", n_swap, "trials 9-16 must repeat 1-8 with A and B swapped");
            if (repeat.a != first.a || repeat.b != first.b || repeat.x != first.x ||
                repeat.distance != first.distance || repeat.direction != first.direction)
                add("block-repeat", n_rep, "trials 17-24 must repeat 1-8");
        }
    }
    return report;
}

std::vector<Presentation> randomize_presentation(const TrialSchedule& schedule, std::uint64_t seed) {
    Rng rng(seed, "presentation");
    std::vector<Presentation> order;
    order.reserve(schedule.trials.size());
    for (const auto& t : schedule.trials) order.push_back({t.index, rng.coin()});
    return order;
}

std::string schedule_to_csv(const TrialSchedule& schedule) {
    std::ostringstream out;
    auto row = [&](std::string_view name, auto field) {
        out << name;
        for (const auto& t : schedule.trials) out << ',' << field(t);
        out << '\n';
    };
    row("Test", [](const Trial& t) { return t.index; });
    row("A", [](const Trial& t) { return t.a; });
    row("B", [](const Trial& t) { return t.b; });
    row("X", [](const Trial& t) { return t.x; });
    row("D", [](const Trial& t) { return t.distance; });
    row("Dir", [](const Trial& t) { return direction_symbol(t.direction); });
    return out.str();
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    for (auto& s : cells) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }
    return cells;
}

int parse_int_cell(const std::string& s) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw InvalidArgument("non-integer cell '" + s + "'");
    return static_cast<int>(v);
}

}  // namespace

TrialSchedule schedule_from_csv(std::string_view csv) {
    std::map<std::string, std::vector<std::string>> rows;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        std::string key = cells.front();
        cells.erase(cells.begin());
        if (width == 0) width = cells.size();
        if (cells.size() != width) throw InvalidArgument("ragged schedule row '" + key + "'");
        rows[key] = std::move(cells);
    }
    if (rows.empty()) throw InvalidArgument("empty schedule");
    for (const char* k : {"Test", "A", "B", "X", "D", "Dir"})
        if (!rows.count(k)) throw InvalidArgument(std::string("schedule is missing row '") + k + "'");

    TrialSchedule s;
    for (std::size_t i = 0; i < width; ++i) {
        Trial t;
        t.index = parse_int_cell(rows["Test"][i]);
        t.a = parse_int_cell(rows["A"][i]);
        t.b = parse_int_cell(rows["B"][i]);
        t.x = parse_int_cell(rows["X"][i]);
        t.distance = parse_int_cell(rows["D"][i]);
        const std::string& dir = rows["Dir"][i];
        if (dir == "↑" || dir == "up") t.direction = Direction::Harder;
        else if (dir == "↓" || dir == "down") t.direction = Direction::Softer;
        else throw InvalidArgument("bad direction cell '" + dir + "'");
        s.trials.push_back(t);
    }
    return s;
}

}  // namespace stiffbench
