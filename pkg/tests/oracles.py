"""Slow, independent reference implementations used only by the tests.

Nothing here imports the library's numerical code.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


# --------------------------------------------------------------------------
# Boosting (all rows, all features): recursive depth-first trees with split
# gains computed in exact rational arithmetic.


def _midpoint(lo: float, hi: float) -> float:
    t = 0.5 * (lo + hi)
    return t if lo < t else hi


def _leaf(res, rows, lam):
    return math.fsum(res[i] for i in rows) / (len(rows) + lam)


def _grow(X, res, rows, depth, max_depth, min_leaf, lam):
    """Nested tuples: ("leaf", w) or ("split", f, t, left, right)."""
    if depth >= max_depth or len(rows) < 2 * min_leaf:
        return ("leaf", _leaf(res, rows, lam))
    lam_q = Fraction(lam)
    r_q = {i: Fraction(res[i]) for i in rows}
    G = sum(r_q.values())
    n = len(rows)
    parent = G * G / (n + lam_q)
    best = None  # (gain, f, t)
    for f in range(X.shape[1]):
        ordered = sorted(rows, key=lambda i: X[i, f])
        GL = Fraction(0)
        for pos in range(n - 1):
            GL += r_q[ordered[pos]]
            lo, hi = X[ordered[pos], f], X[ordered[pos + 1], f]
            if not lo < hi:
                continue
            nl = pos + 1
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            GR = G - GL
            gain = GL * GL / (nl + lam_q) + GR * GR / (nr + lam_q) - parent
            if best is None or gain > best[0]:
                best = (gain, f, _midpoint(lo, hi))
    if best is None or not best[0] > 0:
        return ("leaf", _leaf(res, rows, lam))
    _, f, t = best
    left = [i for i in rows if X[i, f] < t]
    right = [i for i in rows if not X[i, f] < t]
    return (
        "split", f, t,
        _grow(X, res, left, depth + 1, max_depth, min_leaf, lam),
        _grow(X, res, right, depth + 1, max_depth, min_leaf, lam),
    )


def _eval(node, x):
    while node[0] == "split":
        node = node[3] if x[node[1]] < node[2] else node[4]
    return node[1]


def boost_oracle(X, y, n_estimators, learning_rate, max_depth, min_leaf=1, lam=1.0):
    """Returns (base, trees); predict with ``boost_oracle_predict``."""
    X = np.asarray(X, dtype=float)
    y = [float(v) for v in y]
    n = len(y)
    base = math.fsum(y) / n
    pred = [base] * n
    trees = []
    for _ in range(n_estimators):
        res = [y[i] - pred[i] for i in range(n)]
        tree = _grow(X, res, list(range(n)), 0, max_depth, min_leaf, lam)
        trees.append(tree)
        pred = [pred[i] + learning_rate * _eval(tree, X[i]) for i in range(n)]
    return base, trees


def boost_oracle_predict(model, X, learning_rate):
    base, trees = model
    out = []
    for x in np.asarray(X, dtype=float):
        out.append(base + learning_rate * math.fsum(_eval(t, x) for t in trees))
    return np.array(out)


# --------------------------------------------------------------------------
# Terrain, one cell at a time


def slope_oracle(z, dx, dy):
    """Horn slope in degrees.  At a border the missing neighbour column is
    replaced by the centre column (one-sided difference over one step) and a
    missing neighbour row drops out of the (1, 2, 1) weighting."""
    h, w = z.shape
    out = np.full((h, w), np.nan)
    for r in range(h):
        for c in range(w):
            # d/dx: differences across columns, weighted over rows r-1, r, r+1
            cl, cr = max(c - 1, 0), min(c + 1, w - 1)
            num = wsum = 0.0
            for rr, wt in ((r - 1, 1.0), (r, 2.0), (r + 1, 1.0)):
                if 0 <= rr < h:
                    d = 0.0 if cr == cl else (z[rr, cr] - z[rr, cl]) / ((cr - cl) * dx)
                    num += wt * d
                    wsum += wt
            gx = num / wsum
            # d/dy: differences across rows, weighted over columns c-1, c, c+1
            ru, rd = max(r - 1, 0), min(r + 1, h - 1)
            num = wsum = 0.0
            for cc, wt in ((c - 1, 1.0), (c, 2.0), (c + 1, 1.0)):
                if 0 <= cc < w:
                    d = 0.0 if rd == ru else (z[rd, cc] - z[ru, cc]) / ((rd - ru) * dy)
                    num += wt * d
                    wsum += wt
            gy = num / wsum
            out[r, c] = math.degrees(math.atan(math.sqrt(gx * gx + gy * gy)))
    return out


def focal_mean_oracle(z, radius, dx, dy):
    """Mean of the valid cells whose centre lies within ``radius``."""
    h, w = z.shape
    out = np.full((h, w), np.nan)
    reach_r = int(radius // dy) + 1
    reach_c = int(radius // dx) + 1
    for r in range(h):
        for c in range(w):
            vals = []
            for rr in range(r - reach_r, r + reach_r + 1):
                for cc in range(c - reach_c, c + reach_c + 1):
                    if not (0 <= rr < h and 0 <= cc < w):
                        continue
                    dist = math.hypot((rr - r) * dy, (cc - c) * dx)
                    if dist <= radius * (1 + 1e-9) and not math.isnan(z[rr, cc]):
                        vals.append(z[rr, cc])
            if vals:
                out[r, c] = math.fsum(vals) / len(vals)
    return out


def tpi_oracle(z, radius, dx, dy):
    return z - focal_mean_oracle(z, radius, dx, dy)


# --------------------------------------------------------------------------
# Statistics


def pearson_oracle(a, b):
    n = len(a)
    ma = math.fsum(a) / n
    mb = math.fsum(b) / n
    sab = math.fsum((x - ma) * (y - mb) for x, y in zip(a, b))
    saa = math.fsum((x - ma) ** 2 for x in a)
    sbb = math.fsum((y - mb) ** 2 for y in b)
    if saa == 0 or sbb == 0:
        return 0.0
    return sab / math.sqrt(saa * sbb)


def r2_oracle(y, p):
    my = math.fsum(y) / len(y)
    ss_res = math.fsum((a - b) ** 2 for a, b in zip(y, p))
    ss_tot = math.fsum((a - my) ** 2 for a in y)
    return 1.0 - ss_res / ss_tot
