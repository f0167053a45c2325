"""Corpus preparation: publisher filter, stratified split, feature scaling."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyClass, ValidationError
from .featurize import FEATURE_NAMES, NUMERIC_FEATURES, NUMERIC_INDEX, FeatureVector
from .label import LabeledExample
from .records import Label

logger = logging.getLogger(__name__)

SPLITS = ("train", "test", "validation")
DEFAULT_RATIOS = (0.8, 0.1, 0.1)
CLASS_ORDER = (Label.RESEARCH, Label.NON_RESEARCH)


def filter_small_publishers(examples: Sequence[LabeledExample], min_works: int = 5000,
                            stats: Optional[dict] = None) -> list[LabeledExample]:
    """Drop examples whose publisher contributes fewer than ``min_works`` examples."""
    counts = Counter(ex.publisher for ex in examples)
    kept = [ex for ex in examples if counts[ex.publisher] >= min_works]
    if stats is not None:
        stats["removed"] = len(examples) - len(kept)
        stats["removed_publishers"] = sorted(p for p, n in counts.items() if n < min_works)
    logger.info("publisher filter (min %d): kept %d of %d", min_works, len(kept), len(examples))
    return kept


def _largest_remainder(total: int, ratios: Sequence[Fraction]) -> list[int]:
    quotas = [total * r for r in ratios]
    counts = [int(q) for q in quotas]
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[: total - sum(counts)]:
        counts[i] += 1
    return counts


def allocate_split_counts(class_sizes: Sequence[int], ratios: Sequence[float]) -> list[list[int]]:
    """Per-class split sizes that respect both class totals and split totals.

    Split totals are the largest-remainder apportionment of the corpus size. Each
    cell is the floor or ceiling of its exact quota; among the roundings meeting
    both margins the one with the largest summed remainder wins, earlier classes
    and earlier splits first on ties.
    """
    fr = [Fraction(str(r)) for r in ratios]
    if abs(sum(fr) - 1) > Fraction(1, 10**9):
        raise ValidationError(f"ratios must sum to 1, got {float(sum(fr))}")
    if abs(sum(fr) - 1) != 0:
        fr[-1] = 1 - sum(fr[:-1])
    split_totals = _largest_remainder(sum(class_sizes), fr)
    quotas = [[n * r for r in fr] for n in class_sizes]
    floors = [[int(q) for q in row] for row in quotas]
    row_need = [n - sum(row) for n, row in zip(class_sizes, floors)]
    col_need = [t - sum(col) for t, col in zip(split_totals, zip(*floors))]

    best, best_score = None, None
    choices = [itertools.combinations(range(len(fr)), k) for k in row_need]
    for combo in itertools.product(*[list(c) for c in choices]):
        cols = Counter(j for picks in combo for j in picks)
        if any(cols[j] != col_need[j] for j in range(len(fr))):
            continue
        score = sum(quotas[c][j] - floors[c][j] for c, picks in enumerate(combo) for j in picks)
        if best_score is None or score > best_score:
            best, best_score = combo, score
    if best is None:  # cannot happen for 2-D controlled rounding; guard anyway
        raise ValidationError("no consistent split allocation")
    counts = [row[:] for row in floors]
    for c, picks in enumerate(best):
        for j in picks:
            counts[c][j] += 1
    return counts


@dataclass(frozen=True)
class SplitAssignment:
    assignment: dict
    seed: int
    ratios: tuple = DEFAULT_RATIOS

    def keys(self, split: str) -> list[str]:
        return sorted(k for k, s in self.assignment.items() if s == split)

    def rows(self) -> list[dict]:
        return [{"key": k, "split": self.assignment[k]} for k in sorted(self.assignment)]


def stratified_split(examples: Sequence[LabeledExample], ratios: Sequence[float] = DEFAULT_RATIOS,
                     seed: int = 0) -> SplitAssignment:
    """Seeded per-class shuffle, then train/test/validation cut points per class.

    Keys are sorted before shuffling, so the result depends only on the example
    set and the seed.
    """
    by_class = {c: sorted(ex.key for ex in examples if ex.label is c) for c in CLASS_ORDER}
    for c, keys in by_class.items():
        if not keys:
            raise EmptyClass(f"no {c.value} examples")
    sizes = [len(by_class[c]) for c in CLASS_ORDER]
    counts = allocate_split_counts(sizes, ratios)
    assignment = {}
    for ci, c in enumerate(CLASS_ORDER):
        keys = by_class[c]
        rng = np.random.default_rng([seed, ci])
        perm = rng.permutation(len(keys))
        bounds = np.cumsum([0] + counts[ci])
        for si, split in enumerate(SPLITS):
            for idx in perm[bounds[si]:bounds[si + 1]]:
                assignment[keys[idx]] = split
    return SplitAssignment(assignment=assignment, seed=seed, ratios=tuple(ratios))


@dataclass(frozen=True)
class ScalingStats:
    """Per numeric feature mean and population std, fitted on the training split."""

    mean: dict
    std: dict

    def as_dict(self) -> dict:
        return {"mean": dict(self.mean), "std": dict(self.std)}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingStats":
        return cls(mean={k: float(d["mean"][k]) for k in NUMERIC_FEATURES},
                   std={k: float(d["std"][k]) for k in NUMERIC_FEATURES})

    @classmethod
    def identity(cls) -> "ScalingStats":
        return cls(mean={k: 0.0 for k in NUMERIC_FEATURES}, std={k: 1.0 for k in NUMERIC_FEATURES})

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Full-width (mean, divisor) arrays; booleans and constant columns divide by 1."""
        mu, sd = np.zeros(len(FEATURE_NAMES)), np.ones(len(FEATURE_NAMES))
        for name, idx in zip(NUMERIC_FEATURES, NUMERIC_INDEX):
            mu[idx] = self.mean[name]
            sd[idx] = self.std[name] if self.std[name] > 0 else 1.0
        return mu, sd


def fit_scaling(train: Sequence) -> ScalingStats:
    """Fit on LabeledExamples, FeatureVectors, or a raw ``(n, 10)`` matrix."""
    X = as_matrix(train)
    if len(X) == 0:
        raise ValidationError("cannot fit scaling on an empty training split")
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population std (ddof=0)
    return ScalingStats(mean={n: float(mean[i]) for n, i in zip(NUMERIC_FEATURES, NUMERIC_INDEX)},
                        std={n: float(std[i]) for n, i in zip(NUMERIC_FEATURES, NUMERIC_INDEX)})


def apply_scaling(X, stats: ScalingStats) -> np.ndarray:
    """Standardize numeric columns; booleans pass through as 0/1.

    Accepts one FeatureVector/array (returns 1-D) or a batch (returns 2-D).
    """
    mu, sd = stats.vectors()
    if isinstance(X, FeatureVector):
        X = X.as_array()
    elif isinstance(X, (list, tuple)) and X and isinstance(X[0], (FeatureVector, LabeledExample)):
        X = as_matrix(X)
    return (np.asarray(X, dtype=float) - mu) / sd


def as_matrix(items) -> np.ndarray:
    if isinstance(items, np.ndarray):
        return items.astype(float)
    rows = []
    for it in items:
        if isinstance(it, LabeledExample):
            it = it.features
        rows.append(it.as_array() if isinstance(it, FeatureVector) else np.asarray(it, dtype=float))
    return np.array(rows, dtype=float).reshape(len(rows), len(FEATURE_NAMES))


def labels_vector(examples: Sequence[LabeledExample]) -> np.ndarray:
    return np.array([ex.label.as_int for ex in examples], dtype=int)
