"""Exhaustive hyperparameter search scored by weighted F1 on a tuning split."""

from __future__ import annotations

import itertools
import json
import logging
from pathlib import Path
from typing import Optional, Sequence

from ..errors import DoctypeError, GridExhausted, InputNotFound, InvalidHyper, ValidationError
from ..evaluate import evaluate
from .model import FAMILIES, predict_many, train

logger = logging.getLogger(__name__)

DEFAULT_GRID = {
    "knn": {"k": [5, 11, 21, 51]},
    "rf": {"n_trees": [100, 300], "max_depth": [8, 16, None]},
    "adaboost": {"n_rounds": [50, 200], "max_depth": [1, 2]},
    "logreg": {"learning_rate": [0.01, 0.1], "l2": [0.0, 1e-3], "epochs": [200]},
    "baseline": {},
}


def grid_points(family_grid: dict) -> list[dict]:
    """Cartesian product in listed order (first name varies slowest)."""
    names = list(family_grid)
    for name in names:
        if not isinstance(family_grid[name], list) or not family_grid[name]:
            raise InvalidHyper(f"grid entry {name!r} must be a non-empty list")
    return [dict(zip(names, values)) for values in itertools.product(*(family_grid[n] for n in names))]


def load_grid(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputNotFound(str(path))
    grid = json.loads(path.read_text(encoding="utf-8"))
    unknown = set(grid) - set(FAMILIES)
    if unknown:
        raise ValidationError(f"grid file names unknown families: {sorted(unknown)}")
    return grid


def grid_search(family: str, grid: Optional[dict], train_examples: Sequence,
                tune_examples: Sequence, seed: int = 0) -> tuple[dict, list[dict]]:
    """Train one model per grid point and keep the best weighted F1 on ``tune_examples``.

    ``grid`` is either a per-family mapping (``{"knn": {"k": [...]}}``) or the
    family's own ``{name: [values]}``. Ties keep the earlier point. Points that
    fail to train are reported with their error and skipped.
    """
    if not train_examples or not tune_examples:
        raise ValidationError("grid search needs non-empty train and tune splits")
    grid = DEFAULT_GRID if grid is None else grid
    family_grid = grid.get(family, {}) if family in grid or set(grid) <= set(FAMILIES) else grid
    points = grid_points(family_grid) if family_grid else [{}]
    report, best, best_f1 = [], None, None
    for hyper in points:
        try:
            model = train(family, train_examples, hyper, seed=seed)
        except DoctypeError as exc:
            report.append({"hyper": hyper, "weighted_f1": None, "error": f"{type(exc).__name__}: {exc}"})
            continue
        f1 = evaluate(predict_many(model, tune_examples), tune_examples).weighted["f1"]
        report.append({"hyper": hyper, "weighted_f1": f1, "error": None})
        logger.info("%s %s -> weighted F1 %.4f", family, hyper, f1)
        if best_f1 is None or f1 > best_f1:
            best, best_f1 = hyper, f1
    if best is None:
        raise GridExhausted(f"every {family} grid point failed")
    return best, report
