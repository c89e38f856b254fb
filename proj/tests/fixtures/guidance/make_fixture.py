#!/usr/bin/env python3
"""Writes the guidance-effect fixture: model.json, bundle.json, draws.bin.

The model reproduces the reference lagged effects of Health-guidance(2020)
with the simplest admissible structure: no within-time edges, alpha at the
anchor equal to the lag-0 row, and diagonal lag-1 dynamics whose ratios give
the lag-1 and lag-2 rows. Everything here is computed with numpy, separately
from the C++ code under test.

Non-guidance cells of the bundle carry the model's own total effects with a
+-10% band; only the guidance cells come from the reference table.

Run from this directory: python3 make_fixture.py
"""
import json
import struct

import numpy as np

LABELS = [2020, 2021, 2022, 2023]
ANCHOR = 1

VARIABLES = [
    ("Health-guidance", "intervention", "binary", "intervention"),
    ("BMI", "outcome", "continuous", "outcome"),
    ("SBP", "outcome", "continuous", "outcome"),
    ("DBP", "outcome", "continuous", "outcome"),
    ("HbA1c", "outcome", "continuous", "outcome"),
    ("LDL", "outcome", "continuous", "outcome"),
    ("Drug-HT", "exogenous", "binary", "medication"),
    ("Drug-DM", "exogenous", "binary", "medication"),
    ("Drug-LDL", "exogenous", "binary", "medication"),
    ("Smoke", "exogenous", "binary", "lifestyle"),
    ("Exercise", "exogenous", "binary", "lifestyle"),
    ("Alcohol", "exogenous", "binary", "lifestyle"),
    ("Age", "exogenous", "continuous", "background"),
    ("Sex", "exogenous", "binary", "background"),
    ("Check_num", "baseline_only", "categorical", "baseline"),
]
OUTCOMES = ["BMI", "SBP", "DBP", "HbA1c", "LDL"]
EXOGENOUS = [v[0] for v in VARIABLES if v[1] == "exogenous"]

# point, low, high per outcome and lag (rows: lag 0, 1, 2)
TABLE = {
    "BMI": [(-0.129, -0.165, -0.094), (-0.067, -0.109, -0.029), (-0.031, -0.076, 0.014)],
    "SBP": [(-0.737, -1.112, -0.358), (-0.117, -0.543, 0.290), (0.203, -0.250, 0.630)],
    "DBP": [(-0.185, -0.450, 0.080), (0.305, 0.011, 0.591), (0.531, 0.207, 0.837)],
    "HbA1c": [(-0.005, -0.014, 0.005), (-0.007, -0.017, 0.005), (0.002, -0.010, 0.015)],
    "LDL": [(-0.258, -0.928, 0.439), (0.086, -0.683, 0.845), (0.348, -0.472, 1.175)],
}
LEVEL = {"BMI": 24.0, "SBP": 125.0, "DBP": 78.0, "HbA1c": 5.6, "LDL": 120.0}
SCALE = {
    "Health-guidance": 0.5, "BMI": 3.5, "SBP": 15.0, "DBP": 10.0, "HbA1c": 0.6, "LDL": 30.0,
    "Drug-HT": 0.4, "Drug-DM": 0.25, "Drug-LDL": 0.35, "Smoke": 0.4, "Exercise": 0.45,
    "Alcohol": 0.45, "Age": 10.0, "Sex": 0.5, "Check_num": 1.0,
}
BOUNDS = {
    "BMI": [10.0, 60.0], "SBP": [70.0, 250.0], "DBP": [40.0, 150.0], "HbA1c": [3.0, 15.0],
    "LDL": [20.0, 400.0], "Age": [18.0, 110.0], "Check_num": [0.0, 3.0],
}
MESSAGES = {
    "estimate": "Changing {source} is expected to change {target} by {value} at lag {lag}.",
    "goal_estimate": "Reaching {target} = {desired} at lag {lag} requires {source} = {value}.",
    "goal_binary": "Setting {source} to {value} brings {target} closest to {desired} (gap {gap}).",
    "no_detectable_effect":
        "No statistically detectable effect of {source} on {target} at lag {lag}; no numerical recommendation is shown.",
    "not_supported": "The query is not supported under the current configuration.",
    "input_implausible": "An input value is outside its plausible range: {detail}.",
}

p, q, V, T = len(OUTCOMES), len(EXOGENOUS), len(VARIABLES), len(LABELS)
lag0 = np.array([TABLE[o][0][0] for o in OUTCOMES])
lag1 = np.array([TABLE[o][1][0] for o in OUTCOMES])
lag2 = np.array([TABLE[o][2][0] for o in OUTCOMES])
level = np.array([LEVEL[o] for o in OUTCOMES])

# diagonal lag-1 coefficients at t = 2 and t = 3
d = {2: lag1 / lag0, 3: lag2 / lag1}
alpha = {1: lag0, 2: lag0, 3: lag0}
B_cross = {1: np.zeros((p, p)), 2: np.diag(d[2]), 3: np.diag(d[3])}
# intercepts that keep the no-guidance trajectory at LEVEL
intercepts = {t: (np.ones(p) - np.diag(B_cross[t])) * level for t in (1, 2, 3)}


def matrix(m):
    return [[float(x) for x in row] for row in m]


def vector(v):
    return [float(x) for x in v]


schema = {
    "variables": [{"name": n, "role": r, "kind": k, "group": g} for n, r, k, g in VARIABLES],
    "timeLabels": LABELS,
}
equations = []
for t in (1, 2, 3):
    equations.append({
        "t": t,
        "label": LABELS[t],
        "ordering": OUTCOMES,
        "alpha": vector(alpha[t]),
        "B_within": matrix(np.zeros((p, p))),
        "B_cross": matrix(B_cross[t]),
        "C_within": matrix(np.zeros((p, q))),
        "C_cross": matrix(np.zeros((p, q))),
        "intercepts": vector(intercepts[t]),
        "residualVariance": vector(np.ones(p)),
    })
scales = [[SCALE[v[0]] for v in VARIABLES] for _ in range(T)]
model = {
    "format": "wlingam.model/1",
    "schema": schema,
    "outcomes": OUTCOMES,
    "exogenous": EXOGENOUS,
    "equations": equations,
    "delta": vector(np.zeros(p)),
    "scales": scales,
    "audit": [],
    "auxiliary": None,
    "provenance": {"schemaHash": "", "maskHash": "", "panelHash": "", "version": "fixture"},
}

# --- bundle -------------------------------------------------------------------
sources = [v[0] for v in VARIABLES if v[1] != "baseline_only"]
profile = [v[0] for v in VARIABLES]
lags = [0, 1, 2]
point = np.zeros((3, len(sources), p))
low = np.zeros_like(point)
high = np.zeros_like(point)
for s, name in enumerate(sources):
    if name == "Health-guidance":
        for k, o in enumerate(OUTCOMES):
            for lag in lags:
                point[lag, s, k], low[lag, s, k], high[lag, s, k] = TABLE[o][lag]
    elif name in OUTCOMES:
        k = OUTCOMES.index(name)
        effect = [1.0, d[2][k], d[2][k] * d[3][k]]
        for lag in lags:
            e = effect[lag]
            point[lag, s, k] = e
            low[lag, s, k] = min(0.9 * e, 1.1 * e)
            high[lag, s, k] = max(0.9 * e, 1.1 * e)
uncertain = (low <= 0) & (0 <= high)

# no-change trajectory: level(lag) = offset + gain . profile
v_col = profile.index("Health-guidance")
out_cols = [profile.index(o) for o in OUTCOMES]
offset = [np.zeros(p)]
gain0 = np.zeros((p, V))
gain0[np.arange(p), out_cols] = 1.0
gain = [gain0]
for t in (2, 3):
    prev_off, prev_gain = offset[-1], gain[-1]
    D = B_cross[t]
    off = intercepts[t] + D @ prev_off
    g = D @ prev_gain
    g[:, v_col] += alpha[t]
    offset.append(off)
    gain.append(g)

bounds = dict(BOUNDS)
for n, r, k, _ in VARIABLES:
    if k == "binary" and n not in bounds:
        bounds[n] = [0.0, 1.0]

bundle = {
    "format": "wlingam.bundle/1",
    "index": "[lag][source][target]",
    "anchorTime": ANCHOR,
    "anchorLabel": LABELS[ANCHOR],
    "ciLevel": 0.95,
    "sources": sources,
    "targets": OUTCOMES,
    "lags": lags,
    "point": [matrix(point[l]) for l in lags],
    "ciLow": [matrix(low[l]) for l in lags],
    "ciHigh": [matrix(high[l]) for l in lags],
    "uncertain": [[[bool(x) for x in row] for row in uncertain[l]] for l in lags],
    "profile": [{"name": n, "kind": k} for n, _, k, _ in VARIABLES],
    "trajectory": {"offset": [vector(o) for o in offset], "gain": [matrix(g) for g in gain]},
    "scales": {n: SCALE[n] for n in profile},
    "bounds": bounds,
    "messages": MESSAGES,
    "provenance": {"modelHash": ""},
}


# --- draws ----------------------------------------------------------------------
def fixture_draws(lo, hi, n=1000):
    """n values whose type-7 2.5% and 97.5% quantiles are exactly lo and hi."""
    width = hi - lo
    sorted_draws = np.empty(n)
    sorted_draws[:24] = lo - width * (24 - np.arange(24)) / 100.0
    sorted_draws[24:26] = lo
    sorted_draws[26:974] = lo + width * (np.arange(26, 974) - 25) / 949.0
    sorted_draws[974:976] = hi
    sorted_draws[976:] = hi + width * (np.arange(976, n) - 975) / 100.0
    order = np.random.default_rng(2020).permutation(n)
    return sorted_draws[order]


# guidance cells only, lag-major then outcome order
draws = []
for lag in lags:
    for o in OUTCOMES:
        _, lo, hi = TABLE[o][lag]
        d_ = fixture_draws(lo, hi)
        check = np.quantile(d_, [0.025, 0.975], method="linear")
        assert check[0] == lo and check[1] == hi, (o, lag, check)
        draws.append(d_)

with open("model.json", "w") as f:
    json.dump(model, f, indent=2, sort_keys=True)
    f.write("\n")
with open("bundle.json", "w") as f:
    json.dump(bundle, f, indent=2, sort_keys=True)
    f.write("\n")
with open("draws.bin", "wb") as f:
    for d_ in draws:
        f.write(struct.pack("<%dd" % len(d_), *d_))
