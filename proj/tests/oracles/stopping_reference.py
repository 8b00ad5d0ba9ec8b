"""Scratch reference implementation of the Poisson-process and knee stopping
loops, written independently of the C++ library (scipy least squares and the
scipy Poisson quantile). Used once to cross-check the C++ outcomes on
synthetic rankings; the agreeing stop ranks are frozen into
tests/test_methods.cpp.

usage: python3 stopping_reference.py QRELS [QRELS ...]
Qrels written by `ppstop generate` list every document in rank order.
"""
import json
import math
import sys
from collections import OrderedDict

import numpy as np
from scipy import optimize, stats

T, CONF, ALPHA, BETA, GAMMA, DELTA = 0.7, 0.95, 0.3, 0.05, 20, 0.7


def load(path):
    topics = OrderedDict()
    for line in open(path):
        t, _, doc, label = line.split()
        topics.setdefault(t, []).append(int(label) > 0)
    return topics


def frac(f, n):
    return min(max(math.ceil(f * n - 1e-9), 1), n)


def fit(rel, end, width):
    xs, ys = [], []
    lo = 1
    while lo <= end:
        hi = min(lo + width - 1, end)
        xs.append((lo + hi) / 2)
        ys.append(sum(rel[lo - 1:hi]) / (hi - lo + 1))
        lo = hi + 1
    xs, ys = np.array(xs), np.array(ys)
    if len(xs) < 2 or ys.max() == 0:
        return None
    v = np.log(np.maximum(ys, 0.5 / width))
    kappa, u = np.polyfit(xs, v, 1)

    def resid(p):
        return ys - np.exp(p[0] + p[1] * xs)

    sol = optimize.least_squares(resid, [u, kappa], method="lm", xtol=1e-15,
                                 ftol=1e-15, gtol=1e-15, max_nfev=20000)
    return math.exp(sol.x[0]), sol.x[1]


def pp(rel):
    n = len(rel)
    a, b = frac(ALPHA, n), frac(BETA, n)
    cum = np.concatenate([[0], np.cumsum(rel)])
    if cum[a] < GAMMA:
        return n, False
    end = a
    while True:
        model = fit(rel, end, b)
        nxt = min(end + b, n)
        if model is not None:
            d, k = model
            pred = sum(d * math.exp(k * i) for i in range(1, end + 1))
            if cum[end] >= DELTA * pred and k * n <= 700:
                lam = d * n if abs(k) < 1e-9 else d / k * math.expm1(k * n)
                R = int(stats.poisson.ppf(CONF, lam)) if lam > 0 else 0
                q = math.ceil(R * T - 1e-9)
                for r in range(end, nxt + 1):
                    if cum[r] >= q:
                        return r, True
        if end == n:
            return n, False
        end = nxt


def km(rel, eps):
    n = len(rel)
    a, b = frac(ALPHA, n), frac(BETA, n)
    cum = np.concatenate([[0], np.cumsum(rel)])
    end = a
    while True:
        tot = cum[end]
        if tot > 0:
            r = np.arange(1, end + 1)
            diff = cum[1:end + 1] / tot - r / end
            s = int(np.argmax(diff)) + 1
            if s < end:
                ratio = (cum[s] / s) / ((cum[end] - cum[s] + 1) / (end - s))
                if ratio >= eps + 6 - min(tot, eps):
                    return end, True
        if end == n:
            return n, False
        end = min(end + b, n)


def oracle(rel):
    tot = sum(rel)
    cum = 0
    for i, x in enumerate(rel, 1):
        cum += x
        if cum / tot >= T:
            return i


out = {}
for path in sys.argv[1:]:
    for tid, rel in load(path).items():
        key = path.rsplit("/", 1)[-1].split(".")[0] + "/" + tid
        out[key] = {"pp": pp(rel)[0], "km-tuned": km(rel, 50)[0],
                    "km-default": km(rel, 150)[0],
                    "or": oracle(rel) if sum(rel) else None,
                    "relevant": int(sum(rel))}
print(json.dumps(out, indent=0, sort_keys=True))
