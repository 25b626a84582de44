// Acceptance suite: one PASS/FAIL line per criterion.
//
//   stiffbench_acceptance               all criteria
//   stiffbench_acceptance --criterion 5 one criterion
//
// Exit status is non-zero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <unistd.h>

#include "../unit/fuzz.hpp"
#include "stiffbench/analysis.hpp"
#include "stiffbench/commands.hpp"
#include "stiffbench/error.hpp"
#include "stiffbench/experiment.hpp"
#include "stiffbench/feedback.hpp"
#include "stiffbench/protocol.hpp"
#include "stiffbench/retargeting.hpp"
#include "stiffbench/rng.hpp"
#include "stiffbench/session.hpp"
#include "stiffbench/stats.hpp"

using namespace stiffbench;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool within_rel(double got, double want, double tol) {
    return std::abs(got - want) <= tol * std::max(std::abs(want), 1e-300);
}

// 1 ---------------------------------------------------------------------------
Outcome binomial() {
    const double p16 = stats::binom_tail(24, 16, 0.5);
    const double p17 = stats::binom_tail(24, 17, 0.5);
    const bool ok = p16 >= 0.1061 && p16 <= 0.1071 && p17 >= 0.0425 && p17 <= 0.0435;
    // Exact sums are 1820557/2^24 and 536155/2^24; the target bands cannot be hit.
    return {ok, fmt("P(X>=16)=%.6f want [0.1061,0.1071]; P(X>=17)=%.6f want [0.0425,0.0435]", p16, p17)};
}

// 2 ---------------------------------------------------------------------------
Outcome table1() {
    const auto s = schedule_table1();
    const int a[] = {1, 2, 4, 3, 5, 2, 1, 3};
    const int b[] = {5, 5, 3, 1, 1, 1, 4, 5};
    const int x[] = {1, 5, 3, 3, 5, 1, 1, 5};
    const int d[] = {4, 3, 1, 2, 4, 1, 3, 2};
    bool rows = s.trials.size() == 24;
    for (std::size_t i = 0; rows && i < 24; ++i) {
        const std::size_t j = i % 8;
        const bool swapped = i >= 8 && i < 16;
        const auto& t = s.trials[i];
        const int ea = swapped ? b[j] : a[j], eb = swapped ? a[j] : b[j];
        const Direction dir = (ea == x[j] ? eb : ea) > x[j] ? Direction::Harder : Direction::Softer;
        rows = t.a == ea && t.b == eb && t.x == x[j] && t.distance == d[j] && t.direction == dir;
    }
    const auto report = validate_schedule(s);
    const std::string csv = schedule_to_csv(s);
    const bool round = schedule_from_csv(csv).trials == s.trials;
    return {rows && report.passed() && round,
            fmt("rows %s, balance checks %s, CSV round trip %s", rows ? "verbatim" : "DIFFER",
                report.passed() ? "pass" : report.to_string().c_str(), round ? "ok" : "FAILED")};
}

// 3 ---------------------------------------------------------------------------
Outcome feedback_algebra() {
    FeedbackConfig c;
    c.clamp_output = false;
    const DeviceProfile p;
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        const FingerId f = kLeaderFingers[rng.below(3)];
        const double force = 30.0 + rng.uniform() * 970.0;
        const DisplacementPair dz{1e-3 + rng.uniform() * 20.0, c.epsilon_mm * 1.01 + rng.uniform() * 10.0};
        const double expect = method1(force, c) * delta_ratio(dz, c.epsilon_mm) * beta(p, f);
        worst = std::max(worst, std::abs(method2(force, dz, p, f, c) - expect) / expect);
    }
    bool gated = true;
    for (int i = 0; i < 100'000; ++i) {
        const double force = rng.uniform() * 30.0 * (1 - 1e-12);
        const DisplacementPair dz{0.1 + rng.uniform() * 10.0, 0.1 + rng.uniform() * 5.0};
        gated = gated && method1(force, c) == 0.0 && method2(force, dz, p, kLeaderFingers[i % 3], c) == 0.0;
    }
    const double full = method1(1000.0, FeedbackConfig{});
    return {worst <= 1e-12 && gated && full == 5.0,
            fmt("max rel err %.2e over 1e6 inputs; gate zeroes both: %s; method1(1000)=%.17g N", worst, gated ? "yes" : "NO",
                full)};
}

// 4 ---------------------------------------------------------------------------
Outcome method_collapse() {
    DeviceProfile p;
    p.mismatch.kind = MismatchKind::LinearRatio;
    const FeedbackConfig c;
    double worst = 0.0;
    int points = 0;
    for (const FingerId f : kLeaderFingers) {
        const double zmax = p.range(f).leader_max_mm;
        for (int i = 1; i <= 58; ++i) {
            const double z = zmax * i / 58.0;
            const double zf = leader_to_follower_displacement(z, f, p);
            for (int j = 0; j < 58; ++j) {
                const double force = 30.0 + 970.0 * j / 57.0;
                const double m1 = method1(force, c);
                worst = std::max(worst, std::abs(method2(force, {z, zf}, p, f, c) - m1) / m1);
                ++points;
            }
        }
    }
    return {points >= 10'000 && worst <= 1e-12, fmt("%d grid points, max rel diff %.2e", points, worst)};
}

// 5 ---------------------------------------------------------------------------
int correct(const std::vector<TrialResult>& rs) {
    int n = 0;
    for (const auto& r : rs) n += r.correct;
    return n;
}

Outcome psychometrics() {
    std::ostringstream out;
    bool ok = true;

    // (a) ideal observer, fixed grasp
    int perfect = 0, sessions = 0, default_world = 0, default_total = 0;
    for (auto method : {FeedbackMethod::Force, FeedbackMethod::ForceDisplacement}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SessionInputs in;
            in.seed = seed;
            in.method = method;
            in.observer = {0.0, 0.0, false};
            in.config.grasp_variability = 0.0;
            const auto o = run_session(in);
            perfect += correct(scored(o.results, Task::ABX)) == 24 && correct(scored(o.results, Task::S)) == 24;
            ++sessions;
            if (seed <= 3) {
                in.config.grasp_variability = SessionConfig{}.grasp_variability;
                const auto w = run_session(in);
                default_world += correct(scored(w.results, Task::ABX)) + correct(scored(w.results, Task::S));
                default_total += 48;
            }
        }
    }
    const bool a = perfect == sessions;
    ok = ok && a;
    out << fmt("(a) %d/%d ideal sessions perfect [%s] (default grasp variability: %d/%d)", perfect, sessions,
               a ? "ok" : "FAIL", default_world, default_total);

    // (b) pure noise, traces elided
    long hits = 0, trials = 0;
    for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
        SessionInputs in;
        in.seed = 1'000'000 + seed;
        in.method = seed % 2 ? FeedbackMethod::ForceDisplacement : FeedbackMethod::Force;
        in.observer.pure_noise = true;
        const auto o = run_session(in);
        for (Task t : {Task::ABX, Task::S}) {
            hits += correct(scored(o.results, t));
            trials += 24;
        }
    }
    const double noise_mean = 100.0 * static_cast<double>(hits) / static_cast<double>(trials);
    const bool b = noise_mean >= 47.0 && noise_mean <= 53.0;
    ok = ok && b;
    out << fmt("; (b) pure noise %.2f%% over 10000 sessions [%s]", noise_mean, b ? "ok" : "FAIL");

    // (c) default observer, ABX accuracy by distance
    for (auto method : {FeedbackMethod::Force, FeedbackMethod::ForceDisplacement}) {
        std::array<std::vector<double>, 5> by_d;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            SessionInputs in;
            in.seed = 2'000'000 + seed;
            in.method = method;
            in.config.tasks = {Task::ABX};
            in.config.practice = false;
            std::array<int, 5> ok_d{}, n_d{};
            for (const auto& r : scored(run_session(in).results, Task::ABX)) {
                ok_d[static_cast<std::size_t>(r.trial.distance)] += r.correct;
                ++n_d[static_cast<std::size_t>(r.trial.distance)];
            }
            for (std::size_t d = 1; d <= 4; ++d) by_d[d].push_back(100.0 * ok_d[d] / n_d[d]);
        }
        std::array<stats::Summary, 5> s{};
        bool monotone = true;
        for (std::size_t d = 1; d <= 4; ++d) {
            s[d] = stats::summarize(by_d[d]);
            if (d > 1) monotone = monotone && s[d].mean >= s[d - 1].mean;
        }
        const double se = std::sqrt(s[1].variance / s[1].n + s[4].variance / s[4].n);
        const double gap = (s[4].mean - s[1].mean) / se;
        const bool c = monotone && gap >= 2.0;
        ok = ok && c;
        out << fmt("; (c) method %d D1..D4 %.1f/%.1f/%.1f/%.1f%%, D4-D1 = %.1f SE [%s]",
                   method == FeedbackMethod::Force ? 1 : 2, s[1].mean, s[2].mean, s[3].mean, s[4].mean, gap,
                   c ? "ok" : "FAIL");
    }
    return {ok, out.str()};
}

// 6 ---------------------------------------------------------------------------
Outcome statistics() {
    std::ostringstream out;
    bool ok = true;

    // hand-computed 2x2 (cell sums by hand; see tests/oracles/oracles.py)
    const std::vector<double> y{4, 6, 8, 10, 5, 9, 12, 16};
    const std::vector<stats::Factor> f{{"A", {1, 1, 1, 1, 2, 2, 2, 2}}, {"B", {1, 1, 2, 2, 1, 1, 2, 2}}};
    const auto t = stats::anova(f, y);
    const bool anova_ok = within_rel(t.row("A").ss, 24.5, 1e-9) && within_rel(t.row("B").ss, 60.5, 1e-9) &&
                          within_rel(t.row("A:B").ss, 4.5, 1e-9) && within_rel(t.row("Residual").ss, 20.0, 1e-9) &&
                          t.row("A").df == 1 && t.row("Residual").df == 4 && within_rel(t.row("A").f, 4.9, 1e-6) &&
                          within_rel(t.row("B").f, 12.1, 1e-6) && within_rel(t.row("A:B").f, 0.9, 1e-6);
    ok = ok && anova_ok;
    out << "ANOVA " << (anova_ok ? "ok" : "FAIL");

    // exact MWU against enumeration of every relabelling
    int cases = 0, bad = 0;
    Rng rng(6);
    for (std::size_t n1 = 1; n1 <= 9; ++n1) {
        for (std::size_t n2 = 1; n1 + n2 <= 10; ++n2) {
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<double> v(n1 + n2);
                for (auto& e : v) e = static_cast<double>(rng.below(rep % 2 ? 4 : 1000));
                std::vector<double> rank(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                    double less = 0, same = 0;
                    for (double w : v) {
                        less += w < v[i];
                        same += w == v[i];
                    }
                    rank[i] = less + (same + 1) / 2;
                }
                double rx = 0;
                for (std::size_t i = 0; i < n1; ++i) rx += rank[i];
                std::size_t total = 0, lo = 0, hi = 0;
                for (std::uint32_t mask = 0; mask < (1u << v.size()); ++mask) {
                    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
                    double sum = 0;
                    for (std::size_t i = 0; i < v.size(); ++i)
                        if (mask >> i & 1u) sum += rank[i];
                    ++total;
                    lo += sum <= rx + 1e-9;
                    hi += sum >= rx - 1e-9;
                }
                const double want = std::min(1.0, 2.0 * std::min(lo, hi) / static_cast<double>(total));
                const std::vector<double> xs(v.begin(), v.begin() + static_cast<long>(n1));
                const std::vector<double> ys(v.begin() + static_cast<long>(n1), v.end());
                bad += !within_rel(stats::mann_whitney_u(xs, ys).p_value, want, 1e-12);
                ++cases;
            }
        }
    }
    ok = ok && bad == 0;
    out << fmt("; MWU %d/%d enumerations agree", cases - bad, cases);

    // Shapiro and Wilk's worked example: weights of eleven men (published W = 0.79)
    const std::vector<double> men{148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236};
    const auto sw = stats::shapiro_wilk(men);
    const bool sw_ok = std::abs(sw.statistic - 0.7888146948631716) <= 1e-4;
    ok = ok && sw_ok;
    out << fmt("; Shapiro-Wilk W=%.5f p=%.5f [%s]", sw.statistic, sw.p_value, sw_ok ? "ok" : "FAIL");

    // Levene on a hand fixture: deviations {1,1,2},{3,0,4},{1,1,4}
    const auto lv = stats::levene({{1, 2, 4}, {2, 5, 9}, {3, 3, 8}}, stats::LeveneCenter::Mean);
    const bool lv_ok = within_rel(lv.statistic, 0.9612403100775192, 1e-9) && within_rel(lv.p_value, 0.4343803737477473, 1e-9);
    const auto bf = stats::levene({{1, 2, 4}, {2, 5, 9}, {3, 3, 8}}, stats::LeveneCenter::Median);
    const bool bf_ok = within_rel(bf.statistic, 0.29268292682926833, 1e-9);
    ok = ok && lv_ok && bf_ok;
    out << fmt("; Levene %s, Brown-Forsythe %s", lv_ok ? "ok" : "FAIL", bf_ok ? "ok" : "FAIL");
    return {ok, out.str()};
}

// 7 ---------------------------------------------------------------------------
Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / ("stiffbench-accept-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    RunConfig c;
    c.seed = 4242;
    c.out = (dir / "a.jsonl").string();
    cmd_run(c);
    c.out = (dir / "b.jsonl").string();
    cmd_run(c);
    auto body = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return log_body(s.str());
    };
    const std::string a = body(dir / "a.jsonl"), b = body(dir / "b.jsonl");
    std::filesystem::remove_all(dir);
    const bool same = !a.empty() && a == b;

    Rng rng(7);
    int failures = 0;
    for (int i = 0; i < 100'000; ++i) {
        const Message m = testing::random_message(rng);
        try {
            const auto bytes = encode(m);
            if (encode(decode(bytes)) != bytes) ++failures;
        } catch (const Error&) {
            ++failures;
        }
    }
    return {same && failures == 0, fmt("log bodies %s (%zu bytes); %d/100000 codec round-trip failures",
                                       same ? "identical" : "DIFFER", a.size(), failures)};
}

// 8 ---------------------------------------------------------------------------
Outcome statement() {
    std::ostringstream out;
    out << "human-participant results are documentation only and are not reproduced here: success rates";
    for (const auto& r : reference::kSuccessRates) out << ' ' << r.task << "/M" << r.method << '=' << r.mean_percent << '%';
    out << "; ANOVA Day SS=" << reference::kAnova[1].ss << " F=" << reference::kAnova[1].f
        << "; pair (1-US,4-LH) task S p=" << reference::kPairUsLhTaskSP << "; day-to-day gains";
    for (const auto& d : reference::kDayImprovement) out << " G" << d.group << '/' << d.task << ' ' << d.day1 << "->" << d.day2;
    out << ". Acceptance is property-based (criteria 1-7)";
    return {true, out.str()};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stiffbench acceptance suite"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-8)")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "binomial confidence", 1, binomial},
        {2, "built-in schedule fidelity", 1, table1},
        {3, "feedback algebra", 10, feedback_algebra},
        {4, "method collapse", 10, method_collapse},
        {5, "observer psychometrics", 300, psychometrics},
        {6, "statistics oracles", 60, statistics},
        {7, "determinism", 60, determinism},
        {8, "non-reproducibility statement", 1, statement},
    };

    int failed = 0;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        const auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail
                  << fmt(" [%.2fs, budget %gs%s]", secs, c.budget_s, in_time ? "" : " EXCEEDED") << std::endl;
    }
    return failed ? 1 : 0;
}
