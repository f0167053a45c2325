"""CART classification tree with weighted Gini impurity.

Trees are stored flat so they serialize to plain lists: ``feature[i] == -1`` marks
a leaf, otherwise samples with ``x[feature] <= threshold`` go to ``left[i]``.
``value[i]`` is the weighted share of the positive class at node ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class Tree:
    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)

    def _add(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(float(value))
        return len(self.value) - 1

    def as_dict(self) -> dict:
        return {"feature": self.feature, "threshold": self.threshold, "left": self.left,
                "right": self.right, "value": self.value}

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(feature=[int(v) for v in d["feature"]], threshold=[float(v) for v in d["threshold"]],
                   left=[int(v) for v in d["left"]], right=[int(v) for v in d["right"]],
                   value=[float(v) for v in d["value"]])

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        feature, threshold = np.asarray(self.feature), np.asarray(self.threshold)
        left, right = np.asarray(self.left), np.asarray(self.right)
        node = np.zeros(len(X), dtype=int)
        rows = np.arange(len(X))
        active = feature[node] != -1
        while active.any():
            r, nd = rows[active], node[active]
            go_left = X[r, feature[nd]] <= threshold[nd]
            node[r] = np.where(go_left, left[nd], right[nd])
            active = feature[node] != -1
        return np.asarray(self.value)[node]


def resolve_max_features(max_features, n_features: int) -> int:
    if max_features is None or max_features == "all":
        return n_features
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(math.log2(n_features)))
    if isinstance(max_features, float) and 0 < max_features <= 1:
        return max(1, int(max_features * n_features))
    if isinstance(max_features, int) and 1 <= max_features <= n_features:
        return max_features
    raise ValueError(f"bad max_features: {max_features!r}")


def _best_split(X, y, w, features, min_leaf, max_features):
    """Scan ``features`` in order until ``max_features`` splittable ones were tried.

    Features without any admissible cut do not count toward the budget.
    """
    best = (None, None, 0.0)  # feature, threshold, weighted impurity
    total_w = w.sum()
    total_pos = (w * y).sum()
    p = total_pos / total_w
    best_imp = total_w * 2 * p * (1 - p)
    n = len(y)
    tried = 0
    for f in features:
        if tried >= max_features:
            break
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cw = np.cumsum(w[order])[:-1]
        cp = np.cumsum((w * y)[order])[:-1]
        idx = np.arange(1, n)  # left size for a cut after position i-1
        valid = (xs[:-1] < xs[1:]) & (idx >= min_leaf) & (n - idx >= min_leaf) \
            & (cw > 0) & (total_w - cw > 0)
        if not valid.any():
            continue
        tried += 1
        lw, lp = cw[valid], cp[valid]
        rw, rp = total_w - lw, total_pos - lp
        # w * gini = w * 2p(1-p) = 2 * pos_weight * (1 - pos_weight / w)
        imp = 2 * lp * (1 - lp / lw) + 2 * rp * (1 - rp / rw)
        i = int(np.argmin(imp))
        if imp[i] < best_imp - 1e-12:
            cut = np.flatnonzero(valid)[i]
            best_imp = imp[i]
            best = (int(f), float((xs[cut] + xs[cut + 1]) / 2.0), best_imp)
    return best


def fit_tree(X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None,
             max_depth: Optional[int] = None, min_leaf: int = 1, max_features=None,
             rng: Optional[np.random.Generator] = None) -> Tree:
    n, d = X.shape
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    y = np.asarray(y, dtype=float)
    k = resolve_max_features(max_features, d)
    rng = rng or np.random.default_rng(0)
    tree = Tree()

    # preorder build with an explicit stack: (rows, depth, parent, is_left)
    stack = [(np.arange(n), 0, -1, False)]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        ww, yy = w[rows], y[rows]
        value = (ww * yy).sum() / ww.sum() if ww.sum() > 0 else 0.0
        node = tree._add(value)
        if parent >= 0:
            if is_left:
                tree.left[parent] = node
            else:
                tree.right[parent] = node
        if (max_depth is not None and depth >= max_depth) or value in (0.0, 1.0) \
                or len(rows) < 2 * min_leaf:
            continue
        features = rng.permutation(d) if k < d else np.arange(d)
        f, thr, _ = _best_split(X[rows], yy, ww, features, min_leaf, k)
        if f is None:
            continue
        tree.feature[node] = f
        tree.threshold[node] = thr
        go_left = X[rows, f] <= thr
        # push right first so the left subtree gets the next ids
        stack.append((rows[~go_left], depth + 1, node, False))
        stack.append((rows[go_left], depth + 1, node, True))
    return tree
