#!/usr/bin/env python3
"""Independent reference values for the C++ unit tests.

Run once; the printed numbers are frozen into tests/unit/*.cpp and
tests/fixtures/stiffness.csv is (re)written. Nothing here imports the
stiffbench module.

    python3 tests/oracles/oracles.py
"""

import csv
import itertools
import json
import math
import pathlib
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy import stats
import statsmodels.api as sm
from statsmodels.formula.api import ols

HERE = pathlib.Path(__file__).resolve().parent
FIXTURES = HERE.parent / "fixtures"
out = {}

# --- stiffness -------------------------------------------------------------
NU = 0.5
A_MM = 2.0
R_OO = 1.19


def modulus_a(s):
    # Gent: E in MPa from Shore A
    return 0.0981 * (56 + 7.62336 * s) / (0.137505 * (254 - 2.54 * s))


def modulus_oo(s):
    # type-OO spring force at its indentation, inverted through Hertz
    force = 0.2039 + 0.00908 * s
    depth = 2.54 * (1 - s / 100)
    return 3 * force * (1 - NU**2) / (4 * math.sqrt(R_OO) * depth**1.5)


samples = [
    (1, "1-US", "Ecoflex 00-10", "OO", 10),
    (2, "2-S", "Ecoflex 00-30", "OO", 30),
    (3, "3-M", "Ecoflex 00-50", "OO", 50),
    (4, "4-LH", "Dragon Skin 20", "A", 20),
    (5, "5-H", "Dragon Skin 30", "A", 30),
]
rows = []
for level, label, material, scale, shore in samples:
    e = modulus_oo(shore) if scale == "OO" else modulus_a(shore)
    k = 2 * A_MM * e / (1 - NU**2)
    rows.append([level, label, material, scale, shore, repr(e), repr(k)])
FIXTURES.mkdir(exist_ok=True)
with open(FIXTURES / "stiffness.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["level", "label", "material", "scale", "shore", "youngs_modulus_mpa", "stiffness_n_per_mm"])
    w.writerows(rows)
out["stiffness"] = {r[1]: float(r[6]) for r in rows}

# --- retargeting / feedback (hand arithmetic) --------------------------------
def piecewise(u, kl=0.5, kf=0.65):
    return u * kf / kl if u <= kl else kf + (u - kl) * (1 - kf) / (1 - kl)


out["thumb_map_4.5"] = piecewise(4.5 / 18) * 8
out["thumb_map_13.5"] = piecewise(13.5 / 18) * 8
out["index_map_11"] = piecewise(11 / 22) * 10
alpha = 5.0 / 1000.0
dz_f = out["thumb_map_4.5"]
out["method2_thumb_500"] = alpha * 500 * (4.5 / dz_f) * (8 / 18)
k5 = out["stiffness"]["5-H"]
deepest = max(piecewise(0.9) * fr * 2.0 / (k5 + 2.0) for fr in (8, 10, 10))
out["full_squeeze_depth_5H"] = deepest
out["auto_counts_per_newton"] = 1000 / (0.4 * k5 * deepest)

# --- binomial ----------------------------------------------------------------
def exact_tail(n, k):
    return float(Fraction(sum(math.comb(n, j) for j in range(k, n + 1)), 2**n))


out["binom_24_16"] = exact_tail(24, 16)
out["binom_24_17"] = exact_tail(24, 17)
out["binom_100_60_0.3"] = float(stats.binom.sf(59, 100, 0.3))
out["binom_10000_5100"] = float(stats.binom.sf(5099, 10000, 0.5))

# --- distributions -----------------------------------------------------------
out["f_sf"] = {
    "3.5,2,17": stats.f.sf(3.5, 2, 17),
    "13.42,1,1": stats.f.sf(13.42, 1, 1),
    "0.6,1,1": stats.f.sf(0.6, 1, 1),
    "1.0,5,30": stats.f.sf(1.0, 5, 30),
    "26.8946808511,1,9": stats.f.sf(26.8946808511, 1, 9),
}
out["norm_ppf"] = {str(p): stats.norm.ppf(p) for p in (0.975, 1e-10, 0.3, 0.999999)}
out["norm_cdf"] = {str(x): stats.norm.cdf(x) for x in (-8.0, -1.5, 0.0, 2.25)}
out["betainc"] = {"2,3,0.4": float(__import__("scipy.special").special.betainc(2, 3, 0.4)),
                  "0.5,0.5,0.9": float(__import__("scipy.special").special.betainc(0.5, 0.5, 0.9))}

# --- Shapiro-Wilk --------------------------------------------------------------
sw = {}
for name, data in {
    "weights": [148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236],
    "ten": [2.1, 3.4, 1.9, 5.6, 4.4, 3.8, 2.9, 4.0, 3.3, 5.1],
    "three": [1, 2, 4],
    "five": [0.5, 1.5, 1.7, 2.2, 8.0],
}.items():
    r = stats.shapiro(data)
    sw[name] = [float(r.statistic), float(r.pvalue)]
q30 = stats.norm.ppf((np.arange(1, 31) - 0.375) / 30.25)
sw["normal_quantiles_30"] = [float(v) for v in stats.shapiro(q30)]
out["shapiro"] = sw

# --- Levene ------------------------------------------------------------------
lev = {}
g3 = [[1, 2, 4], [2, 5, 9], [3, 3, 8]]
skew = [[1, 2, 3, 10], [2, 3, 4, 20]]
for name, groups in (("three", g3), ("skew", skew)):
    for center in ("mean", "median"):
        r = stats.levene(*groups, center=center)
        lev[f"{name}_{center}"] = [float(r.statistic), float(r.pvalue)]
out["levene"] = lev

# --- ANOVA -------------------------------------------------------------------
def anova(df, formula):
    t = sm.stats.anova_lm(ols(formula, data=df).fit(), typ=2)
    return {idx: [float(t.loc[idx, "sum_sq"]), float(t.loc[idx, "df"]),
                  None if math.isnan(t.loc[idx, "F"]) else float(t.loc[idx, "F"]),
                  None if math.isnan(t.loc[idx, "PR(>F)"]) else float(t.loc[idx, "PR(>F)"])]
            for idx in t.index}


toy = pd.DataFrame({"y": [4, 6, 8, 10, 5, 9, 12, 16],
                    "A": ["a1"] * 4 + ["a2"] * 4,
                    "B": ["b1", "b1", "b2", "b2"] * 2})
out["anova_2x2"] = anova(toy, "y ~ C(A) * C(B)")
y3 = [70, 75, 62, 66, 80, 71, 58, 64, 77, 83, 69, 61, 74, 79, 55, 68]
levels = list(itertools.product([1, 2], [1, 2], [1, 2], [1, 2]))
d3 = pd.DataFrame({"y": y3, "G": [l[0] for l in levels], "D": [l[1] for l in levels], "T": [l[2] for l in levels]})
pairwise = "y ~ C(G) + C(D) + C(T) + C(G):C(D) + C(G):C(T) + C(D):C(T)"
out["anova_3f"] = anova(d3, pairwise)
cells = d3.groupby(["G", "D", "T"], as_index=False)["y"].mean()
out["anova_3f_cells"] = anova(cells, pairwise)

# --- Mann-Whitney ------------------------------------------------------------
def brute_mwu(x, y):
    pooled = list(x) + list(y)
    ranks = stats.rankdata(pooled)
    n1 = len(x)
    rx = sum(ranks[:n1])
    sums = [sum(ranks[i] for i in c) for c in itertools.combinations(range(len(pooled)), n1)]
    lo = sum(1 for s in sums if s <= rx + 1e-9) / len(sums)
    hi = sum(1 for s in sums if s >= rx - 1e-9) / len(sums)
    return rx - n1 * (n1 + 1) / 2, min(1.0, 2 * min(lo, hi))


mw = {}
mw["no_ties"] = brute_mwu([1.1, 3.4, 2.2, 5.0], [0.3, 4.1, 6.2, 7.7, 8.8])
mw["ties"] = brute_mwu([1, 2, 2, 3, 5], [2, 3, 4, 4, 6, 7])
big_x = [62.5, 70.8, 75.0, 66.7, 79.2, 70.8, 83.3, 75.0, 58.3, 70.8]
big_y = [75.0, 79.2, 83.3, 70.8, 87.5, 79.2, 91.7, 75.0, 66.7, 83.3]
r = stats.mannwhitneyu(big_x, big_y, alternative="two-sided", method="asymptotic", use_continuity=True)
mw["asymptotic"] = [float(r.statistic), float(r.pvalue)]
out["mwu"] = mw

print(json.dumps(out, indent=2, default=float))
