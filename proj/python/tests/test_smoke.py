import math

import pytest

import stiffbench
from stiffbench import stats


def test_catalog_is_ordered():
    cat = stiffbench.catalog()
    assert [s["level"] for s in cat] == [1, 2, 3, 4, 5]
    assert cat[-1]["label"] == "5-H"
    ks = [s["stiffness"] for s in cat]
    assert ks == sorted(ks)
    assert ks[0] == pytest.approx(0.23448419263097223, rel=1e-13)


def test_feedback_laws():
    assert stiffbench.method1(1000.0) == 5.0
    assert stiffbench.method1(29.0) == 0.0
    assert stiffbench.gate(29.0)
    assert stiffbench.method2(500.0, 4.5, 2.6) == pytest.approx(1.923076923076923, rel=1e-14)
    assert stiffbench.method2(500.0, 10.0, 5.0, finger="middle") > 0.0
    with pytest.raises(stiffbench.StiffbenchError):
        stiffbench.method2(500.0, 4.5, 2.6, finger="ring")
    assert stiffbench.leader_to_follower_displacement(4.5) == pytest.approx(2.6)
    assert stiffbench.leader_to_follower_displacement(9.0, mismatch="linear") == pytest.approx(4.0)


def test_schedule():
    rows = stiffbench.schedule_table1()
    assert len(rows) == 24
    assert (rows[0]["a"], rows[0]["b"], rows[0]["x"], rows[0]["distance"]) == (1, 5, 1, 4)
    assert stiffbench.validate_schedule_csv(stiffbench.schedule_csv()) == []
    bad = stiffbench.schedule_csv().replace("X,1,5,3", "X,1,5,4", 1)
    codes = {v[0] for v in stiffbench.validate_schedule_csv(bad)}
    assert "x-level" in codes


def test_session_is_deterministic():
    overrides = {"squeeze.duration_s": "1", "run.seed": "9", "run.tasks": "ABX"}
    a = stiffbench.run_session(overrides=overrides)
    b = stiffbench.run_session(overrides=overrides)
    assert a["ABX"] == b["ABX"]
    assert len(a["ABX"]) == 24
    assert a["log"].splitlines()[1:] == b["log"].splitlines()[1:]


def test_ideal_observer_is_perfect():
    r = stiffbench.run_session(
        "[observer]\nweber = 0\nlapse = 0\n[contact]\ngrasp_variability = 0\n[squeeze]\nduration_s = 1\n")
    assert all(r["ABX"]) and all(r["S"])


def test_config_errors_raise():
    with pytest.raises(stiffbench.ConfigError):
        stiffbench.run_session("[run]\nseeed = 1\n")
    with pytest.raises(stiffbench.StiffbenchError):
        stiffbench.run_session(overrides={"run.method": "3"})


def test_stats_against_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    x = [62.5, 70.8, 75.0, 66.7, 79.2, 70.8, 83.3, 75.0, 58.3, 70.8]
    y = [75.0, 79.2, 83.3, 70.8, 87.5, 79.2, 91.7, 75.0, 66.7, 83.3]
    ours = stats.mann_whitney_u(x, y)
    ref = scipy_stats.mannwhitneyu(x, y, alternative="two-sided", method="asymptotic")
    assert ours["statistic"] == ref.statistic
    assert ours["p_value"] == pytest.approx(ref.pvalue, rel=1e-10)
    w = stats.shapiro_wilk(x)
    assert w["statistic"] == pytest.approx(scipy_stats.shapiro(x).statistic, abs=1e-8)
    lev = stats.levene([x, y], "median")
    assert lev["p_value"] == pytest.approx(scipy_stats.levene(x, y, center="median").pvalue, rel=1e-9)
    assert stats.binom_tail(24, 17) == pytest.approx(scipy_stats.binom.sf(16, 24, 0.5), rel=1e-13)


def test_anova_rows_and_errors():
    rows = stats.anova([("A", [1, 1, 1, 1, 2, 2, 2, 2]), ("B", [1, 1, 2, 2, 1, 1, 2, 2])],
                       [4, 6, 8, 10, 5, 9, 12, 16])
    by = {r["source"]: r for r in rows}
    assert by["A"]["ss"] == pytest.approx(24.5)
    assert math.isnan(by["Residual"]["f"])
    with pytest.raises(stiffbench.UnbalancedDesign):
        stats.anova([("A", [1, 1, 1, 2])], [1, 2, 3, 4])
    with pytest.raises(stiffbench.DegenerateSample):
        stats.shapiro_wilk([1.0, 1.0, 1.0])
