"""Random forest and discrete AdaBoost over :mod:`tree` learners."""

import math

import numpy as np

from .tree import fit_tree


def fit_forest(X, y, n_trees=100, max_depth=None, min_leaf=1, max_features="sqrt", seed=0):
    children = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    n = len(y)
    for child in children:
        rng = np.random.default_rng(child)
        rows = rng.integers(0, n, size=n)
        trees.append(fit_tree(X[rows], y[rows], max_depth=max_depth, min_leaf=min_leaf,
                              max_features=max_features, rng=rng))
    return trees


def forest_scores(trees, X):
    """Share of trees voting for the positive class."""
    votes = np.zeros(len(np.atleast_2d(X)))
    for tree in trees:
        votes += tree.predict_proba(X) >= 0.5
    return votes / len(trees)


# stage weight used when a learner is perfect on the weighted sample
_EPS = 1e-10


def fit_adaboost(X, y, n_rounds=50, max_depth=1, seed=0):
    """Discrete AdaBoost; returns a list of ``(tree, stage_weight)``.

    Stops early when a learner is perfect or no better than chance.
    """
    n = len(y)
    sign = np.where(y == 1, 1.0, -1.0)
    w = np.full(n, 1.0 / n)
    rng = np.random.default_rng(seed)
    stages = []
    for _ in range(n_rounds):
        tree = fit_tree(X, y, sample_weight=w, max_depth=max_depth, rng=rng)
        h = np.where(tree.predict_proba(X) >= 0.5, 1.0, -1.0)
        err = float(w[h != sign].sum() / w.sum())
        if err >= 0.5:
            if not stages:
                stages.append((tree, 0.0))
            break
        err = max(err, _EPS)
        alpha = 0.5 * math.log((1 - err) / err)
        stages.append((tree, alpha))
        if err <= _EPS:
            break
        w = w * np.exp(-alpha * sign * h)
        w /= w.sum()
    return stages


def adaboost_margin(stages, X):
    F = np.zeros(len(np.atleast_2d(X)))
    for tree, alpha in stages:
        F += alpha * np.where(tree.predict_proba(X) >= 0.5, 1.0, -1.0)
    return F


def adaboost_scores(stages, X):
    # sigmoid(2F): the additive-logistic reading of the boosted margin
    F = adaboost_margin(stages, X)
    return 1.0 / (1.0 + np.exp(-2.0 * F))

