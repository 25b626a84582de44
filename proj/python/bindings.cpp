// Python bindings: the sample catalog, feedback laws, schedule, sessions and
// the statistics routines.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stiffbench/config.hpp"
#include "stiffbench/error.hpp"
#include "stiffbench/experiment.hpp"
#include "stiffbench/feedback.hpp"
#include "stiffbench/retargeting.hpp"
#include "stiffbench/session.hpp"
#include "stiffbench/session_log.hpp"
#include "stiffbench/soft_world.hpp"
#include "stiffbench/stats.hpp"

namespace py = pybind11;
using namespace stiffbench;

namespace {

FingerId leader(const std::string& name) {
    for (const FingerId f : kLeaderFingers)
        if (finger_name(f.name) == name) return f;
    throw InvalidArgument("leader finger must be thumb, index or middle, got '" + name + "'");
}

py::dict test_result(const stats::TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["n1"] = r.n1;
    d["n2"] = r.n2;
    d["exact"] = r.exact;
    d["tie_correction"] = r.tie_correction;
    return d;
}

py::list trials(const TrialSchedule& s) {
    py::list out;
    for (const auto& t : s.trials) {
        py::dict d;
        d["index"] = t.index;
        d["a"] = t.a;
        d["b"] = t.b;
        d["x"] = t.x;
        d["distance"] = t.distance;
        d["direction"] = std::string(direction_symbol(t.direction));
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "stiffbench core";

    static py::exception<Error> base(m, "StiffbenchError", PyExc_ValueError);
    static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
    static py::exception<MalformedLog> malformed_log(m, "MalformedLog", base.ptr());
    static py::exception<UnbalancedDesign> unbalanced(m, "UnbalancedDesign", base.ptr());
    static py::exception<DegenerateSample> degenerate(m, "DegenerateSample", base.ptr());
    static py::exception<NearZeroFollowerDisplacement> near_zero(m, "NearZeroFollowerDisplacement", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            config_error(e.what());
        } catch (const MalformedLog& e) {
            malformed_log(e.what());
        } catch (const UnbalancedDesign& e) {
            unbalanced(e.what());
        } catch (const DegenerateSample& e) {
            degenerate(e.what());
        } catch (const NearZeroFollowerDisplacement& e) {
            near_zero(e.what());
        } catch (const Error& e) {
            base(e.what());
        }
    });

    m.def("catalog", [] {
        py::list out;
        for (const auto& s : catalog()) {
            py::dict d;
            d["level"] = s.stiffness_level();
            d["label"] = std::string(label_name(s.label));
            d["material"] = s.material;
            d["scale"] = std::string(scale_name(s.shore_scale));
            d["shore"] = s.shore_value;
            d["youngs_modulus_mpa"] = s.youngs_modulus_mpa;
            d["stiffness"] = s.stiffness;
            out.append(d);
        }
        return out;
    }, "The five silicone samples with their modulus (MPa) and stiffness (N/mm).");

    m.def("method1", [](double f) { return method1(f, FeedbackConfig{}); }, py::arg("f_follower"),
          "Force-only feedback (N) for a sensed force in counts.");
    m.def(
        "method2",
        [](double f, double dz_leader, double dz_follower, const std::string& finger) {
            return method2(f, {dz_leader, dz_follower}, DeviceProfile{}, leader(finger), FeedbackConfig{});
        },
        py::arg("f_follower"), py::arg("dz_leader"), py::arg("dz_follower"), py::arg("finger") = "thumb",
        "Force-displacement feedback (N) on a leader finger.");
    m.def("gate", [](double f) { return gate(f, FeedbackConfig{}); }, py::arg("f_follower"));
    m.def(
        "leader_to_follower_displacement",
        [](double dz, const std::string& finger, const std::string& mismatch) {
            DeviceProfile p;
            p.mismatch.kind = parse_mismatch_kind(mismatch);
            return leader_to_follower_displacement(dz, leader(finger), p);
        },
        py::arg("dz_leader"), py::arg("finger") = "thumb", py::arg("mismatch") = "piecewise");

    m.def("schedule_table1", [] { return trials(schedule_table1()); });
    m.def("schedule_csv", [] { return schedule_to_csv(schedule_table1()); });
    m.def(
        "validate_schedule_csv",
        [](const std::string& csv) {
            py::list out;
            for (const auto& v : validate_schedule(schedule_from_csv(csv)).violations)
                out.append(py::make_tuple(v.code, v.trial, v.detail));
            return out;
        },
        py::arg("csv"), "Violations as (code, trial, detail); empty when the schedule passes.");

    m.def(
        "run_session",
        [](const std::string& config_text, const std::map<std::string, std::string>& overrides) {
            RunConfig cfg = parse_run_config(config_text);
            for (const auto& [k, v] : overrides) {
                const auto dot = k.find('.');
                if (dot == std::string::npos) throw ConfigError("override key must be section.key: " + k);
                set_config_value(cfg, k.substr(0, dot), k.substr(dot + 1), v);
            }
            cfg.validate();
            SessionInputs in;
            in.method = cfg.method;
            in.observer = cfg.observer;
            in.seed = cfg.seed;
            in.config = cfg.session;
            in.participant = cfg.participant;
            std::ostringstream text;
            SessionOutcome outcome;
            {
                py::gil_scoped_release release;
                SessionLogWriter log(text);
                outcome = run_session(in, &log);
            }
            py::dict result;
            for (Task t : cfg.session.tasks) {
                py::list correct;
                for (const auto& r : scored(outcome.results, t)) correct.append(r.correct);
                result[py::str(std::string(task_name(t)))] = correct;
            }
            result["ticks"] = outcome.ticks;
            result["log"] = text.str();
            return result;
        },
        py::arg("config") = "", py::arg("overrides") = std::map<std::string, std::string>{},
        "Runs one session. `config` is run-configuration text; `overrides` maps 'section.key' to a value.");

    auto st = m.def_submodule("stats", "From-scratch statistics");
    st.def("binom_tail", &stats::binom_tail, py::arg("n"), py::arg("k"), py::arg("p") = 0.5);
    st.def("f_sf", &stats::f_sf);
    st.def("normal_cdf", &stats::normal_cdf);
    st.def("normal_quantile", &stats::normal_quantile);
    st.def("mann_whitney_u", [](const std::vector<double>& x, const std::vector<double>& y) {
        return test_result(stats::mann_whitney_u(x, y));
    });
    st.def("shapiro_wilk", [](const std::vector<double>& x) { return test_result(stats::shapiro_wilk(x)); });
    st.def(
        "levene",
        [](const std::vector<std::vector<double>>& groups, const std::string& center) {
            if (center != "mean" && center != "median") throw InvalidArgument("center must be 'mean' or 'median'");
            return test_result(stats::levene(groups, center == "mean" ? stats::LeveneCenter::Mean : stats::LeveneCenter::Median));
        },
        py::arg("groups"), py::arg("center") = "mean");
    st.def(
        "anova",
        [](const std::vector<std::pair<std::string, std::vector<int>>>& factors, const std::vector<double>& y) {
            std::vector<stats::Factor> f;
            for (const auto& [name, levels] : factors) f.push_back({name, levels});
            py::list out;
            for (const auto& r : stats::anova(f, y).rows) {
                py::dict d;
                d["source"] = r.source;
                d["ss"] = r.ss;
                d["df"] = r.df;
                d["ms"] = r.ms;
                d["f"] = r.f;
                d["p"] = r.p;
                out.append(d);
            }
            return out;
        },
        py::arg("factors"), py::arg("y"), "factors: list of (name, level codes); rows of the ANOVA table.");
}
