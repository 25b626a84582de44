#include "stiffbench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "stiffbench/error.hpp"

namespace stiffbench {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Metadata

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream in(line);
    while (std::getline(in, cell, sep)) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

int to_int(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedLog(std::string("metadata ") + what + " is not an integer: '" + s + "'");
    }
}

}  // namespace

std::vector<ParticipantMeta> parse_metadata_csv(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    std::vector<ParticipantMeta> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line, ',');
        if (header) {
            if (cells != std::vector<std::string>{"id", "group", "day", "method"})
                throw MalformedLog("metadata header must be id,group,day,method");
            header = false;
            continue;
        }
        if (cells.size() != 4) throw MalformedLog("metadata row needs four cells: '" + line + "'");
        ParticipantMeta m{cells[0], to_int(cells[1], "group"), to_int(cells[2], "day"), to_int(cells[3], "method")};
        if (m.id.empty()) throw MalformedLog("metadata row with empty id");
        if (m.group < 1 || m.group > 2 || m.day < 1 || m.day > 2 || m.method < 1 || m.method > 2)
            throw MalformedLog("metadata group, day and method must each be 1 or 2 ('" + line + "')");
        for (const auto& r : rows)
            if (r.id == m.id && r.day == m.day) throw MalformedLog("duplicate metadata for " + m.id + " day " + cells[2]);
        rows.push_back(std::move(m));
    }
    if (header) throw MalformedLog("empty metadata file");
    return rows;
}

std::string metadata_to_csv(const std::vector<ParticipantMeta>& rows) {
    std::ostringstream out;
    out << "id,group,day,method\n";
    for (const auto& r : rows) out << r.id << ',' << r.group << ',' << r.day << ',' << r.method << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Records

int SuccessRecord::successes() const { return static_cast<int>(std::count(correct.begin(), correct.end(), true)); }

double SuccessRecord::success_rate() const {
    if (correct.empty()) return 0.0;
    return 100.0 * successes() / static_cast<double>(correct.size());
}

double SuccessRecord::pair_rate(std::size_t pair) const {
    return pair_total.at(pair) ? 100.0 * pair_correct[pair] / pair_total[pair] : std::nan("");
}

double SuccessRecord::distance_rate(int d) const {
    const auto i = static_cast<std::size_t>(d);
    return distance_total.at(i) ? 100.0 * distance_correct[i] / distance_total[i] : std::nan("");
}

void SuccessRecord::add(int pair, int distance, bool ok) {
    correct.push_back(ok);
    if (pair >= 0 && pair < 8) {
        ++pair_total[static_cast<std::size_t>(pair)];
        if (ok) ++pair_correct[static_cast<std::size_t>(pair)];
    }
    if (distance >= 1 && distance <= 4) {
        ++distance_total[static_cast<std::size_t>(distance)];
        if (ok) ++distance_correct[static_cast<std::size_t>(distance)];
    }
}

std::vector<SuccessRecord> records_from_log(const SessionLog& log, const std::vector<ParticipantMeta>* metadata) {
    try {
        const auto& h = log.header;
        SuccessRecord base;
        base.participant = h.at("participant").get<std::string>();
        base.group = h.value("group", 0);
        base.day = h.value("day", 0);
        base.method = h.at("method").get<int>();
        if (metadata) {
            const auto it = std::find_if(metadata->begin(), metadata->end(), [&](const ParticipantMeta& m) {
                return m.id == base.participant && m.day == base.day;
            });
            if (it == metadata->end())
                throw MalformedLog("no metadata for participant " + base.participant + " day " + std::to_string(base.day));
            if (it->method != base.method)
                throw MalformedLog("log of " + base.participant + " ran method " + std::to_string(base.method) +
                                   " but metadata says " + std::to_string(it->method));
            if (base.group != 0 && base.group != it->group)
                throw MalformedLog("log of " + base.participant + " disagrees with metadata on group");
            base.group = it->group;
        }

        std::vector<SuccessRecord> out;
        bool ended = false;
        for (const auto& r : log.records) {
            const std::string type = r.at("type").get<std::string>();
            if (type == "abort") throw MalformedLog("session of " + base.participant + " aborted: " + r.value("reason", "?"));
            if (type == "end") ended = true;
            if (type != "trial" || r.value("practice", false)) continue;
            const Task task = parse_task(r.at("task").get<std::string>());
            auto rec = std::find_if(out.begin(), out.end(), [&](const SuccessRecord& s) { return s.task == task; });
            if (rec == out.end()) {
                out.push_back(base);
                out.back().task = task;
                rec = out.end() - 1;
            }
            rec->add(r.value("pair", -1), r.at("distance").get<int>(), r.at("correct").get<bool>());
        }
        if (!ended) throw MalformedLog("session log of " + base.participant + " has no end record");
        if (out.empty()) throw MalformedLog("session log of " + base.participant + " has no scored trials");
        for (const auto& rec : out) {
            if (rec.correct.size() != 24)
                throw MalformedLog("task " + std::string(task_name(rec.task)) + " of " + base.participant + " has " +
                                   std::to_string(rec.correct.size()) + " scored trials, expected 24");
        }
        return out;
    } catch (const json::exception& e) {
        throw MalformedLog(std::string("session log field error: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw MalformedLog(e.what());
    }
}

// ---------------------------------------------------------------------------
// Summaries and ANOVA

namespace {

std::vector<double> rates(const std::vector<SuccessRecord>& records, Task task, int method) {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.task == task && r.method == method) out.push_back(r.success_rate());
    return out;
}

bool has_task(const std::vector<SuccessRecord>& records, Task task) {
    return std::any_of(records.begin(), records.end(), [&](const SuccessRecord& r) { return r.task == task; });
}

}  // namespace

stats::Summary success_summary(const std::vector<SuccessRecord>& records, Task task, int method) {
    const auto v = rates(records, task, method);
    if (v.empty())
        throw InvalidArgument("no " + std::string(task_name(task)) + " sessions under method " + std::to_string(method));
    return stats::summarize(v);
}

std::vector<SummaryRow> summary_table(const std::vector<SuccessRecord>& records) {
    if (records.empty()) throw InvalidArgument("no records to summarize");
    std::vector<SummaryRow> rows;
    for (Task task : {Task::ABX, Task::S}) {
        for (int method : {1, 2}) {
            const auto v = rates(records, task, method);
            if (!v.empty()) rows.push_back({task, method, stats::summarize(v)});
        }
    }
    return rows;
}

stats::AnovaTable success_anova(const std::vector<SuccessRecord>& records) {
    stats::Factor g{"Group", {}}, d{"Day", {}}, t{"Task", {}};
    std::vector<double> y;
    for (const auto& r : records) {
        g.levels.push_back(r.group);
        d.levels.push_back(r.day);
        t.levels.push_back(static_cast<int>(r.task));
        y.push_back(r.success_rate());
    }
    return stats::anova({g, d, t}, y);
}

stats::AnovaTable success_anova_cells(const std::vector<SuccessRecord>& records) {
    std::map<std::tuple<int, int, int>, std::pair<double, int>> cells;
    for (const auto& r : records) {
        auto& c = cells[{r.group, r.day, static_cast<int>(r.task)}];
        c.first += r.success_rate();
        ++c.second;
    }
    // Cell means hide imbalance, so check it on the records first.
    (void)success_anova(records);
    stats::Factor g{"Group", {}}, d{"Day", {}}, t{"Task", {}};
    std::vector<double> y;
    for (const auto& [key, c] : cells) {
        g.levels.push_back(std::get<0>(key));
        d.levels.push_back(std::get<1>(key));
        t.levels.push_back(std::get<2>(key));
        y.push_back(c.first / c.second);
    }
    return stats::anova({g, d, t}, y);
}

// ---------------------------------------------------------------------------
// Method comparison

namespace {

double mean_of(const std::vector<double>& v) {
    return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <class Extract>
Comparison compare(const std::vector<const SuccessRecord*>& m1, const std::vector<const SuccessRecord*>& m2, Extract f) {
    std::vector<double> x, y;
    for (const auto* r : m1) x.push_back(f(*r));
    for (const auto* r : m2) y.push_back(f(*r));
    Comparison c;
    c.mean_method1 = mean_of(x);
    c.mean_method2 = mean_of(y);
    c.test = stats::mann_whitney_u(x, y);
    return c;
}

}  // namespace

PairwiseReport pairwise_report(const std::vector<SuccessRecord>& records) {
    if (records.empty()) throw InvalidArgument("no records for the pairwise report");
    PairwiseReport report;
    const auto pairs = designated_pairs();
    for (Task task : {Task::ABX, Task::S}) {
        if (!has_task(records, task)) continue;
        std::vector<const SuccessRecord*> m1, m2;
        for (const auto& r : records) {
            if (r.task != task) continue;
            (r.method == 1 ? m1 : m2).push_back(&r);
        }
        for (int m : {1, 2}) {
            if ((m == 1 ? m1 : m2).empty())
                throw InvalidArgument("task " + std::string(task_name(task)) + " has no sessions under method " +
                                      std::to_string(m) + "; the method comparison needs both");
        }
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            Comparison c = compare(m1, m2, [p](const SuccessRecord& r) { return r.pair_rate(p); });
            c.task = task;
            c.scope = "pair";
            c.label = pairs[p].name();
            c.pair = static_cast<int>(p);
            c.distance = pairs[p].distance;
            report.pairs.push_back(c);
        }
        for (int d = 1; d <= 4; ++d) {
            Comparison c = compare(m1, m2, [d](const SuccessRecord& r) { return r.distance_rate(d); });
            c.task = task;
            c.scope = "distance";
            c.label = "D=" + std::to_string(d);
            c.distance = d;
            report.distances.push_back(c);
        }
        Comparison c = compare(m1, m2, [](const SuccessRecord& r) { return r.success_rate(); });
        c.task = task;
        c.scope = "task";
        c.label = "all";
        report.tasks.push_back(c);
    }
    return report;
}

std::vector<AssumptionRow> assumption_checks(const std::vector<SuccessRecord>& records) {
    std::vector<AssumptionRow> rows;
    for (Task task : {Task::ABX, Task::S}) {
        if (!has_task(records, task)) continue;
        std::vector<std::vector<double>> groups;
        for (int m : {1, 2}) {
            auto v = rates(records, task, m);
            AssumptionRow row{"shapiro_wilk", task, m, std::nullopt, ""};
            if (v.size() < 3) {
                row.note = "fewer than 3 sessions";
            } else {
                try {
                    row.result = stats::shapiro_wilk(v);
                } catch (const DegenerateSample&) {
                    row.note = "constant success rates";
                }
            }
            rows.push_back(row);
            if (!v.empty()) groups.push_back(std::move(v));
        }
        for (auto [name, center] : {std::pair{"levene_mean", stats::LeveneCenter::Mean},
                                    std::pair{"levene_median", stats::LeveneCenter::Median}}) {
            AssumptionRow row{name, task, 0, std::nullopt, ""};
            const bool ok = groups.size() == 2 && groups[0].size() >= 2 && groups[1].size() >= 2;
            if (!ok) {
                row.note = "needs two methods with at least 2 sessions each";
            } else {
                try {
                    row.result = stats::levene(groups, center);
                } catch (const DegenerateSample&) {
                    row.note = "no spread within either method";
                }
            }
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Report text

std::string format_stat(double v) {
    if (std::isnan(v)) return "NA";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "task,method,n,mean_percent,variance,sd\n";
    for (const auto& r : rows)
        out << task_name(r.task) << ',' << r.method << ',' << r.summary.n << ',' << format_stat(r.summary.mean) << ','
            << format_stat(r.summary.variance) << ',' << format_stat(r.summary.sd) << '\n';
    return out.str();
}

std::string anova_csv(const stats::AnovaTable& table) {
    std::ostringstream out;
    out << "source,ss,df,ms,f,p\n";
    for (const auto& r : table.rows)
        out << r.source << ',' << format_stat(r.ss) << ',' << format_stat(r.df) << ',' << format_stat(r.ms) << ','
            << format_stat(r.f) << ',' << format_stat(r.p) << '\n';
    return out.str();
}

std::string nonparametric_csv(const std::vector<AssumptionRow>& checks, const PairwiseReport& report) {
    std::ostringstream out;
    out << "test,task,scope,label,n1,n2,statistic,p,mean_method1,mean_method2,significant,note\n";
    for (const auto& c : checks) {
        out << c.test << ',' << task_name(c.task) << ',' << (c.method ? "method" : "methods") << ','
            << (c.method ? "method " + std::to_string(c.method) : std::string("1 vs 2")) << ',';
        if (c.result) {
            const auto& t = *c.result;
            out << t.n1 << ',' << t.n2 << ',' << format_stat(t.statistic) << ',' << format_stat(t.p_value)
                << ",NA,NA," << (t.p_value < kSignificance ? "yes" : "no") << ',';
        } else {
            out << "NA,NA,NA,NA,NA,NA,NA,";
        }
        out << c.note << '\n';
    }
    auto emit = [&](const std::vector<Comparison>& rows) {
        for (const auto& c : rows) {
            out << "mann_whitney_u," << task_name(c.task) << ',' << c.scope << ",\"" << c.label << "\"," << c.test.n1 << ','
                << c.test.n2 << ',' << format_stat(c.test.statistic) << ',' << format_stat(c.test.p_value) << ','
                << format_stat(c.mean_method1) << ',' << format_stat(c.mean_method2) << ','
                << (c.significant() ? "yes" : "no") << ',' << (c.test.exact ? "exact" : "normal approximation")
                << (c.test.tie_correction ? "; ties" : "") << '\n';
        }
    };
    emit(report.tasks);
    emit(report.distances);
    emit(report.pairs);
    return out.str();
}

std::string spider_csv(const PairwiseReport& report) {
    std::ostringstream out;
    out << "task,pair,label,distance,method,success_rate\n";
    for (const auto& c : report.pairs) {
        for (int m : {1, 2})
            out << task_name(c.task) << ',' << c.pair << ",\"" << c.label << "\"," << c.distance << ',' << m << ','
                << format_stat(m == 1 ? c.mean_method1 : c.mean_method2) << '\n';
    }
    return out.str();
}

json spider_json(const PairwiseReport& report) {
    json j = json::object();
    for (const auto& c : report.pairs) {
        auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
        j[std::string(task_name(c.task))].push_back({{"pair", c.pair},
                                                     {"label", c.label},
                                                     {"distance", c.distance},
                                                     {"method1", num(c.mean_method1)},
                                                     {"method2", num(c.mean_method2)},
                                                     {"p_value", num(c.test.p_value)}});
    }
    return j;
}

std::vector<std::filesystem::path> write_reports(const std::vector<SuccessRecord>& records,
                                                 const std::filesystem::path& dir) {
    // Compute everything first so a failure leaves no partial report set.
    const auto summary = summary_csv(summary_table(records));
    const auto anova = anova_csv(success_anova(records));
    const auto cells = anova_csv(success_anova_cells(records));
    const auto report = pairwise_report(records);
    const auto nonparam = nonparametric_csv(assumption_checks(records), report);
    const auto spider = spider_csv(report);
    const auto spider_j = spider_json(report).dump(2) + "\n";

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    auto put = [&](const char* name, const std::string& body) {
        const auto path = dir / name;
        std::ofstream f(path, std::ios::binary);
        if (!(f << body)) throw IoError("cannot write " + path.string());
        written.push_back(path);
    };
    put("summary.csv", summary);
    put("anova.csv", anova);
    put("anova_cells.csv", cells);
    put("nonparametric.csv", nonparam);
    put("spider.csv", spider);
    put("spider.json", spider_j);
    return written;
}

}  // namespace stiffbench
