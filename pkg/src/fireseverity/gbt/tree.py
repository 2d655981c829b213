"""Regression trees stored as flat node arrays, grown level by level.

Split search is exact greedy: every midpoint between consecutive distinct
values of every candidate feature is scored with

    gain = GL^2/(nL+lam) + GR^2/(nR+lam) - G^2/(n+lam)

where G are residual sums and n row counts (with lam = 0 this is the plain
reduction in squared error).  Rows go left when ``x < threshold``.  Ties go
to the lowest feature index, then the lowest threshold (gains within a
relative 1e-12 of the best are tied).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray  # int32, -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # leaf weight (0 on internal nodes)
    gain: np.ndarray  # split gain (0 on leaves)
    used_features: tuple[int, ...] = ()

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[i] + 1
                depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    @classmethod
    def leaf(cls, weight: float, used_features=()) -> "Tree":
        return cls(
            np.array([-1], dtype=np.int32), np.zeros(1), np.array([-1], dtype=np.int32),
            np.array([-1], dtype=np.int32), np.array([float(weight)]), np.zeros(1),
            tuple(used_features),
        )

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index reached by each row."""
        n = X.shape[0]
        node = np.zeros(n, dtype=np.int64)
        rows = np.arange(n)
        active = self.feature[node] >= 0
        while active.any():
            nd = node[active]
            f = self.feature[nd]
            x = X[rows[active], f]
            node[active] = np.where(x < self.threshold[nd], self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def splits(self):
        """(feature, gain) of every internal node."""
        internal = self.feature >= 0
        return self.feature[internal], self.gain[internal]


# Gains this close (relative) count as tied; mirror-image splits of the same
# node differ only by summation rounding and must not be told apart by it.
TIE_RTOL = 1e-12


def _segment_best(gain: np.ndarray, starts: np.ndarray, ends: np.ndarray):
    """Per segment: best feature row, position and gain, ties to lowest indices."""
    segmax = np.maximum.reduceat(gain, starts, axis=1)  # (k, A)
    top = segmax.max(axis=0)
    with np.errstate(invalid="ignore"):
        floor = np.where(np.isfinite(top), top - TIE_RTOL * np.abs(top), top)
    best_row = np.argmax(segmax >= floor, axis=0)
    best_pos = np.empty(len(starts), dtype=np.int64)
    for s in range(len(starts)):
        seg = gain[best_row[s], starts[s]: ends[s]]
        best_pos[s] = starts[s] + int(np.argmax(seg >= floor[s]))
    best_gain = gain[best_row, best_pos]
    return best_row, best_pos, best_gain


def build_tree(
    X: np.ndarray,
    residual: np.ndarray,
    rows: np.ndarray,
    features: np.ndarray,
    sorted_index: np.ndarray,
    max_depth: int,
    min_samples_leaf: int = 1,
    lambda_l2: float = 1.0,
) -> Tree:
    """Fit one tree to ``residual`` on the sampled ``rows`` and ``features``.

    ``sorted_index[f]`` is the stable argsort of column f over all rows of X;
    it is computed once per training run and filtered to the sample here.
    """
    n = X.shape[0]
    features = np.sort(np.asarray(features, dtype=np.int64))
    rows = np.sort(np.asarray(rows, dtype=np.int64))
    in_sample = np.zeros(n, dtype=bool)
    in_sample[rows] = True
    m = len(rows)
    k = len(features)
    cand = sorted_index[features]
    order = cand[in_sample[cand]].reshape(k, m)
    cols = X[:, features].T  # (k, n) contiguous per feature

    feat, thr, left, right, gain_of = [-1], [0.0], [-1], [-1], [0.0]
    node_of = np.full(n, -1, dtype=np.int64)
    node_of[rows] = 0
    frontier = [0]
    min_rows = 2 * min_samples_leaf

    for _depth in range(max_depth):
        counts_all = np.bincount(node_of[rows], minlength=len(feat))
        active = [nd for nd in frontier if counts_all[nd] >= min_rows]
        if not active:
            break
        A = len(active)
        slot = np.full(len(feat) + 1, A, dtype=np.int64)
        slot[active] = np.arange(A)
        key_dtype = np.uint8 if A < 255 else np.int64
        keys = slot[node_of[order]].astype(key_dtype)
        perm = np.argsort(keys, axis=1, kind="stable")
        counts = counts_all[active]
        C = int(counts.sum())
        grouped = np.take_along_axis(order, perm[:, :C], axis=1)  # (k, C)
        xv = np.take_along_axis(cols, grouped, axis=1)
        gv = residual[grouped]
        cs = np.cumsum(gv, axis=1)

        ends = np.cumsum(counts)
        starts = ends - counts
        seg = np.repeat(np.arange(A), counts)
        base = np.where(starts > 0, cs[:, np.maximum(starts - 1, 0)], 0.0)  # (k, A)
        total = cs[:, ends - 1] - base
        GL = cs - base[:, seg]
        G = total[:, seg]
        GR = G - GL
        pos = np.arange(C)
        nL = (pos - starts[seg] + 1).astype(np.float64)
        nN = counts[seg].astype(np.float64)
        nR = nN - nL
        valid = np.zeros((k, C), dtype=bool)
        valid[:, :-1] = xv[:, :-1] < xv[:, 1:]
        valid &= (nL >= min_samples_leaf) & (nR >= min_samples_leaf)
        valid[:, ends - 1] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = GL * GL / (nL + lambda_l2) + GR * GR / (nR + lambda_l2) - G * G / (nN + lambda_l2)
        gain = np.where(valid, gain, -np.inf)

        best_row, best_pos, best_gain = _segment_best(gain, starts, ends)

        split_feat = np.full(len(feat) + 2 * A, -1, dtype=np.int64)
        split_thr = np.zeros(len(feat) + 2 * A)
        child_l = np.zeros(len(feat) + 2 * A, dtype=np.int64)
        child_r = np.zeros(len(feat) + 2 * A, dtype=np.int64)
        new_frontier = []
        for s, nd in enumerate(active):
            g = best_gain[s]
            if not g > 0.0:
                continue
            r, p = best_row[s], best_pos[s]
            lo, hi = xv[r, p], xv[r, p + 1]
            t = 0.5 * (lo + hi)
            if not lo < t:
                t = hi
            f = int(features[r])
            li, ri = len(feat), len(feat) + 1
            feat[nd], thr[nd], left[nd], right[nd], gain_of[nd] = f, float(t), li, ri, float(g)
            feat += [-1, -1]
            thr += [0.0, 0.0]
            left += [-1, -1]
            right += [-1, -1]
            gain_of += [0.0, 0.0]
            split_feat[nd], split_thr[nd], child_l[nd], child_r[nd] = f, t, li, ri
            new_frontier += [li, ri]
        if not new_frontier:
            break
        nd = node_of[rows]
        sf = split_feat[nd]
        moving = sf >= 0
        mv_rows = rows[moving]
        mv_nd = nd[moving]
        go_left = X[mv_rows, sf[moving]] < split_thr[mv_nd]
        node_of[mv_rows] = np.where(go_left, child_l[mv_nd], child_r[mv_nd])
        frontier = new_frontier

    n_nodes = len(feat)
    sums = np.bincount(node_of[rows], weights=residual[rows], minlength=n_nodes)
    cnts = np.bincount(node_of[rows], minlength=n_nodes)
    feat_a = np.array(feat, dtype=np.int32)
    is_leaf = (feat_a < 0) & (cnts > 0)
    value = np.zeros(n_nodes)
    value[is_leaf] = sums[is_leaf] / (cnts[is_leaf] + lambda_l2)
    return Tree(
        feat_a,
        np.array(thr),
        np.array(left, dtype=np.int32),
        np.array(right, dtype=np.int32),
        value,
        np.array(gain_of),
        tuple(int(f) for f in features),
    )
