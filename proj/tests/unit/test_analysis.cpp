#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "stiffbench/analysis.hpp"
#include "stiffbench/error.hpp"
#include "stiffbench/session.hpp"

using namespace stiffbench;

namespace {

// One record over the built-in schedule; `ok` decides each trial.
template <class Rule>
SuccessRecord synth(const std::string& id, int group, int day, int method, Task task, Rule ok) {
    SuccessRecord r;
    r.participant = id;
    r.group = group;
    r.day = day;
    r.method = method;
    r.task = task;
    for (const auto& t : schedule_table1().trials) {
        const auto p = pair_index(t.a, t.b, t.x);
        r.add(p ? static_cast<int>(*p) : -1, t.distance, ok(t));
    }
    return r;
}

// Ten participants, both days, both tasks, balanced groups.
template <class Rule>
std::vector<SuccessRecord> cohort(Rule ok) {
    std::vector<SuccessRecord> out;
    for (int i = 0; i < 10; ++i) {
        const int group = i < 5 ? 1 : 2;
        for (int day : {1, 2}) {
            const int method = (group == 1) == (day == 1) ? 1 : 2;
            for (Task task : {Task::ABX, Task::S})
                out.push_back(synth("P" + std::to_string(i), group, day, method, task,
                                    [&](const Trial& t) { return ok(t, method, i, day, task); }));
        }
    }
    return out;
}

std::string small_log(bool with_end, int trials, bool abort = false) {
    const nlohmann::json h = {{"type", "header"}, {"format", kSessionLogFormat}, {"participant", "P01"},
                              {"method", 1},      {"day", 1},                   {"group", 1}};
    std::ostringstream out;
    out << h.dump() << '\n';
    for (int i = 0; i < trials; ++i)
        out << nlohmann::json{{"type", "trial"}, {"task", "ABX"}, {"distance", 1}, {"pair", 0}, {"correct", i % 2 == 0}}.dump()
            << '\n';
    if (abort) out << R"({"type":"abort","reason":"test"})" << '\n';
    if (with_end) out << R"({"type":"end"})" << '\n';
    return out.str();
}

SessionLog parse(const std::string& text) {
    std::istringstream in(text);
    return read_session_log(in);
}

}  // namespace

TEST_SUITE("analysis") {
    TEST_CASE("metadata parse, round trip and errors") {
        const std::string csv = "id,group,day,method\nP01,1,1,1\nP01,1,2,2\n";
        const auto rows = parse_metadata_csv(csv);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].method == 2);
        CHECK(metadata_to_csv(rows) == csv);
        CHECK_THROWS_AS(parse_metadata_csv(""), MalformedLog);
        CHECK_THROWS_AS(parse_metadata_csv("id,day\n"), MalformedLog);
        CHECK_THROWS_AS(parse_metadata_csv("id,group,day,method\nP01,1,1\n"), MalformedLog);
        CHECK_THROWS_AS(parse_metadata_csv("id,group,day,method\nP01,x,1,1\n"), MalformedLog);
        CHECK_THROWS_AS(parse_metadata_csv("id,group,day,method\nP01,3,1,1\n"), MalformedLog);
        CHECK_THROWS_AS(parse_metadata_csv("id,group,day,method\nP01,1,1,1\nP01,1,1,2\n"), MalformedLog);
    }

    TEST_CASE("records from a real session log") {
        std::ostringstream buf;
        SessionLogWriter w(buf);
        SessionInputs in;
        in.seed = 17;
        in.config.squeeze.duration_s = 1.0;
        in.participant = "P07";
        in.day = 2;
        in.group = 1;
        in.method = FeedbackMethod::ForceDisplacement;
        const auto outcome = run_session(in, &w);
        const auto recs = records_from_log(parse(buf.str()));
        REQUIRE(recs.size() == 2);
        CHECK(recs[0].task == Task::ABX);
        CHECK(recs[0].method == 2);
        CHECK(recs[0].day == 2);
        int ok = 0;
        for (const auto& r : scored(outcome.results, Task::ABX)) ok += r.correct;
        CHECK(recs[0].successes() == ok);
        int per_pair = 0;
        for (int c : recs[1].pair_total) {
            CHECK(c == 3);
            per_pair += c;
        }
        CHECK(per_pair == 24);
        for (int d = 1; d <= 4; ++d) CHECK(recs[1].distance_total[static_cast<std::size_t>(d)] == 6);

        const std::vector<ParticipantMeta> good{{"P07", 1, 2, 2}};
        CHECK(records_from_log(parse(buf.str()), &good).size() == 2);
        const std::vector<ParticipantMeta> wrong_method{{"P07", 1, 2, 1}};
        CHECK_THROWS_AS(records_from_log(parse(buf.str()), &wrong_method), MalformedLog);
        const std::vector<ParticipantMeta> absent{{"P08", 1, 2, 2}};
        CHECK_THROWS_AS(records_from_log(parse(buf.str()), &absent), MalformedLog);
    }

    TEST_CASE("truncated, aborted and short logs are rejected") {
        CHECK(records_from_log(parse(small_log(true, 24))).at(0).successes() == 12);
        CHECK_THROWS_AS(records_from_log(parse(small_log(false, 24))), MalformedLog);
        CHECK_THROWS_AS(records_from_log(parse(small_log(true, 23))), MalformedLog);
        CHECK_THROWS_AS(records_from_log(parse(small_log(true, 24, true))), MalformedLog);
        CHECK_THROWS_AS(records_from_log(parse(small_log(true, 0))), MalformedLog);
    }

    TEST_CASE("summary of a synthetic cohort") {
        // Method 1 misses every D=1 trial (18/24); method 2 is perfect.
        const auto recs = cohort([](const Trial& t, int method, int, int, Task) { return method == 2 || t.distance != 1; });
        const auto rows = summary_table(recs);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].task == Task::ABX);
        CHECK(rows[0].method == 1);
        CHECK(rows[0].summary.mean == doctest::Approx(75.0));
        CHECK(rows[0].summary.variance == 0.0);
        CHECK(rows[1].summary.mean == 100.0);
        CHECK(rows[0].summary.n == 10);
        CHECK_THROWS_AS(success_summary({}, Task::ABX, 1), InvalidArgument);
    }

    TEST_CASE("method 2 dominating at D=1 is flagged there and nowhere else") {
        const auto recs = cohort([](const Trial& t, int method, int i, int, Task) {
            if (t.distance == 1) return method == 2;
            return (t.index + i) % 3 != 0;  // identical under both methods
        });
        const auto rep = pairwise_report(recs);
        REQUIRE(rep.distances.size() == 8);
        REQUIRE(rep.pairs.size() == 16);
        for (const auto& c : rep.distances) {
            CHECK(c.significant() == (c.distance == 1));
            if (c.distance == 1) {
                CHECK(c.mean_method1 == 0.0);
                CHECK(c.mean_method2 == 100.0);
            }
        }
        for (const auto& c : rep.pairs) CHECK(c.significant() == (c.distance == 1));
        for (const auto& c : rep.tasks) CHECK(c.significant());
    }

    TEST_CASE("equal performance flags nothing") {
        const auto recs = cohort([](const Trial& t, int, int i, int, Task) { return (t.index * 7 + i) % 4 != 0; });
        const auto rep = pairwise_report(recs);
        for (const auto& c : rep.pairs) CHECK_FALSE(c.significant());
        for (const auto& c : rep.distances) CHECK_FALSE(c.significant());
        for (const auto& c : rep.tasks) CHECK(c.test.p_value == doctest::Approx(1.0));
    }

    TEST_CASE("a missing method is an error, not a silent skip") {
        auto recs = cohort([](const Trial&, int, int, int, Task) { return true; });
        std::erase_if(recs, [](const SuccessRecord& r) { return r.method == 2 && r.task == Task::S; });
        CHECK_THROWS_AS(pairwise_report(recs), InvalidArgument);
    }

    TEST_CASE("ANOVA over records and over cells") {
        const auto recs = cohort([](const Trial& t, int, int i, int day, Task task) {
            return (t.index + i + day + (task == Task::S)) % 4 != 0 || day == 2;
        });
        const auto t = success_anova(recs);
        CHECK(t.row("Residual").df == 33.0);
        CHECK(t.row("Day").ss > 0.0);
        const auto c = success_anova_cells(recs);
        CHECK(c.row("Residual").df == 1.0);
        auto unbalanced = recs;
        unbalanced.pop_back();
        CHECK_THROWS_AS(success_anova(unbalanced), UnbalancedDesign);
        CHECK_THROWS_AS(success_anova_cells(unbalanced), UnbalancedDesign);
    }

    TEST_CASE("assumption checks report degenerate samples instead of failing") {
        const auto recs = cohort([](const Trial&, int, int, int, Task) { return true; });
        const auto rows = assumption_checks(recs);
        REQUIRE(rows.size() == 8);
        for (const auto& r : rows) {
            CHECK_FALSE(r.result.has_value());
            CHECK_FALSE(r.note.empty());
        }
    }

    TEST_CASE("report formatting") {
        CHECK(format_stat(std::nan("")) == "NA");
        CHECK(format_stat(0.0) == "0");
        CHECK(format_stat(1.0 / 3.0) == "0.3333333333");
        CHECK(format_stat(75.0) == "75");

        const auto recs = cohort([](const Trial& t, int method, int, int, Task) { return method == 2 || t.distance != 1; });
        testing::TempDir dir("reports");
        const auto files = write_reports(recs, dir.path());
        CHECK(files.size() == 6);
        for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
        const auto spider = nlohmann::json::parse(testing::slurp(dir / "spider.json"));
        CHECK(spider["ABX"].size() == 8);
        CHECK(testing::slurp(dir / "summary.csv").rfind("task,method,n,mean_percent,variance,sd\nABX,1,10,75,0,0\n", 0) == 0);
    }

    TEST_CASE("reference findings are carried for documentation") {
        CHECK(reference::kSuccessRates[0].mean_percent == 74.16);
        CHECK(reference::kPairUsLhTaskSP == 0.048);
    }
}
