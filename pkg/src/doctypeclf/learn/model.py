"""One model interface over the five classifier families, plus the model file format.

A model file is a single JSON object::

    {"format": "doctypeclf-model/1", "family": ..., "hyperparameters": {...},
     "scaling": {"mean": {...}, "std": {...}}, "parameters": {...},
     "training_meta": {"corpus_sha256": ..., "seed": ..., "n_examples": ...}}

Large k-NN training matrices are written to a ``.npy`` sidecar next to the model
file and referenced by relative path and SHA-256.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from ..datasets import ScalingStats, apply_scaling, as_matrix, fit_scaling, labels_vector
from ..errors import InputNotFound, InvalidHyper, MalformedModel, SingleClassInput
from ..featurize import FEATURE_NAMES, FeatureVector
from ..records import Label, Prediction
from . import baseline, ensembles, knn, logreg
from .tree import Tree, resolve_max_features

FORMAT = "doctypeclf-model/1"
FAMILIES = ("logreg", "rf", "knn", "adaboost", "baseline")
DEFAULT_HYPER = {
    "logreg": {"learning_rate": 0.1, "l2": 0.0, "epochs": 200},
    "rf": {"n_trees": 100, "max_depth": None, "min_leaf": 1, "max_features": "sqrt"},
    "knn": {"k": 5},
    "adaboost": {"n_rounds": 50, "max_depth": 1},
    "baseline": {},
}
SIDECAR_MIN_ROWS = 20000


@dataclass
class ModelArtifact:
    family: str
    hyperparameters: dict
    scaling: ScalingStats
    parameters: dict
    training_meta: dict = field(default_factory=dict)

    def to_dict(self, sidecar: Optional[str] = None) -> dict:
        params = dict(self.parameters)
        if self.family == "knn":
            params.pop("train_matrix", None)
            params.pop("labels", None)
            if sidecar is None:
                params["train_matrix"] = np.asarray(self.parameters["train_matrix"]).tolist()
                params["labels"] = np.asarray(self.parameters["labels"]).astype(int).tolist()
        return {
            "format": FORMAT,
            "family": self.family,
            "hyperparameters": self.hyperparameters,
            "scaling": self.scaling.as_dict(),
            "parameters": params,
            "training_meta": self.training_meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _validate_hyper(family: str, hyper: Optional[dict]) -> dict:
    if family not in FAMILIES:
        raise InvalidHyper(f"unknown model family {family!r}")
    merged = dict(DEFAULT_HYPER[family])
    for name, value in (hyper or {}).items():
        if name not in merged:
            raise InvalidHyper(f"{family} has no hyperparameter {name!r}")
        merged[name] = value
    h = merged

    def positive_int(name, allow_none=False):
        v = h[name]
        if v is None and allow_none:
            return
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InvalidHyper(f"{family}.{name} must be a positive integer, got {v!r}")

    if family == "logreg":
        positive_int("epochs")
        if not float(h["learning_rate"]) > 0 or float(h["l2"]) < 0:
            raise InvalidHyper("logreg needs learning_rate > 0 and l2 >= 0")
        h["learning_rate"], h["l2"] = float(h["learning_rate"]), float(h["l2"])
    elif family == "rf":
        positive_int("n_trees")
        positive_int("max_depth", allow_none=True)
        positive_int("min_leaf")
        try:
            resolve_max_features(h["max_features"], len(FEATURE_NAMES))
        except ValueError as exc:
            raise InvalidHyper(str(exc)) from exc
    elif family == "knn":
        positive_int("k")
        if h["k"] % 2 == 0:
            raise InvalidHyper(f"knn k must be odd, got {h['k']}")
    elif family == "adaboost":
        positive_int("n_rounds")
        positive_int("max_depth")
    return h


def corpus_digest(examples: Sequence) -> str:
    h = hashlib.sha256()
    for ex in sorted(examples, key=lambda e: e.key):
        h.update(json.dumps([ex.key, ex.label.value, ex.features.as_dict()], sort_keys=True).encode())
        h.update(b"\n")
    return h.hexdigest()


def train(family: str, examples: Sequence, hyper: Optional[dict] = None, seed: int = 0,
          scaling: Optional[ScalingStats] = None) -> ModelArtifact:
    """Fit one model on labeled examples.

    Scaling statistics are fitted on ``examples`` unless given, and are stored in
    the artifact so prediction applies the same transform.
    """
    h = _validate_hyper(family, hyper)
    meta = {"seed": seed, "n_examples": len(examples)}
    if family == "baseline":
        return ModelArtifact(family, h, scaling or ScalingStats.identity(), {"seed": seed}, meta)

    y = labels_vector(examples)
    if len(examples) == 0 or len(set(y.tolist())) < 2:
        raise SingleClassInput(f"{family} needs examples of both classes")
    meta["corpus_sha256"] = corpus_digest(examples)
    scaling = scaling or fit_scaling(examples)
    X = apply_scaling(as_matrix(examples), scaling)

    if family == "logreg":
        w, b = logreg.fit(X, y, h["learning_rate"], h["l2"], h["epochs"])
        params = {"weights": {n: float(v) for n, v in zip(FEATURE_NAMES, w)}, "bias": float(b)}
    elif family == "rf":
        trees = ensembles.fit_forest(X, y, h["n_trees"], h["max_depth"], h["min_leaf"],
                                     h["max_features"], seed)
        params = {"trees": [t.as_dict() for t in trees]}
    elif family == "knn":
        if h["k"] > len(y):
            raise InvalidHyper(f"knn k={h['k']} exceeds {len(y)} training examples")
        params = {"k": h["k"], "train_matrix": X, "labels": y}
    else:
        stages = ensembles.fit_adaboost(X, y, h["n_rounds"], h["max_depth"], seed)
        params = {"stages": [{"tree": t.as_dict(), "weight": float(a)} for t, a in stages]}
    return ModelArtifact(family, h, scaling, params, meta)


def _check_model(model: ModelArtifact) -> None:
    p = model.parameters
    try:
        if model.family == "logreg":
            if set(p["weights"]) != set(FEATURE_NAMES):
                raise MalformedModel("logreg weights must cover every feature")
            float(p["bias"])
        elif model.family in ("rf", "adaboost"):
            trees = [Tree.from_dict(t) for t in p["trees"]] if model.family == "rf" else \
                [Tree.from_dict(s["tree"]) for s in p["stages"]]
            if not trees:
                raise MalformedModel(f"{model.family} has no trees")
            for t in trees:
                if any(f < -1 or f >= len(FEATURE_NAMES) for f in t.feature):
                    raise MalformedModel("tree references a feature index outside 0-9")
        elif model.family == "knn":
            X = np.asarray(p["train_matrix"], dtype=float)
            k = int(p["k"])
            if X.ndim != 2 or X.shape[1] != len(FEATURE_NAMES) or len(p["labels"]) != len(X):
                raise MalformedModel("knn training matrix has the wrong shape")
            if k < 1 or k % 2 == 0 or k > len(X):
                raise MalformedModel(f"knn k={k} must be odd and within 1..{len(X)}")
        elif model.family == "baseline":
            int(p["seed"])
        else:
            raise MalformedModel(f"unknown family {model.family!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedModel(f"{model.family} parameters: {exc}") from exc


def scores(model: ModelArtifact, X_raw: np.ndarray, keys: Optional[Sequence[str]] = None) -> np.ndarray:
    """Non-research scores for a raw (unscaled) feature matrix."""
    _check_model(model)
    p = model.parameters
    if model.family == "baseline":
        if keys is None:
            raise MalformedModel("baseline scoring needs work keys")
        return np.array([baseline.coin(int(p["seed"]), k) for k in keys])
    X = apply_scaling(np.atleast_2d(X_raw), model.scaling)
    if model.family == "logreg":
        w = np.array([p["weights"][n] for n in FEATURE_NAMES])
        return logreg.predict_proba(w, float(p["bias"]), X)
    if model.family == "knn":
        return knn.knn_scores(np.asarray(p["train_matrix"], dtype=float),
                              np.asarray(p["labels"], dtype=float), int(p["k"]), X)
    if model.family == "rf":
        return ensembles.forest_scores([Tree.from_dict(t) for t in p["trees"]], X)
    stages = [(Tree.from_dict(s["tree"]), float(s["weight"])) for s in p["stages"]]
    return ensembles.adaboost_scores(stages, X)


def _to_prediction(key: str, score: float) -> Prediction:
    score = float(min(1.0, max(0.0, score)))
    return Prediction(key=key, label=Label.NON_RESEARCH if score >= 0.5 else Label.RESEARCH,
                      score=score)


def predict(model: ModelArtifact, features: FeatureVector, key: str = "") -> Prediction:
    return predict_many(model, [(key, features)])[0]


def predict_many(model: ModelArtifact, items: Iterable) -> list[Prediction]:
    """Predict for ``(key, FeatureVector)`` pairs or LabeledExamples."""
    pairs = [(it.key, it.features) if hasattr(it, "features") else it for it in items]
    if not pairs:
        return []
    keys = [k for k, _ in pairs]
    X = np.array([fv.as_array() for _, fv in pairs])
    return [_to_prediction(k, s) for k, s in zip(keys, scores(model, X, keys))]


def save_model(model: ModelArtifact, path, sidecar_min_rows: int = SIDECAR_MIN_ROWS) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sidecar = None
    if model.family == "knn" and len(model.parameters["labels"]) >= sidecar_min_rows:
        sidecar = path.with_suffix(".knn.npy")
        data = np.column_stack([np.asarray(model.parameters["train_matrix"], dtype=float),
                                np.asarray(model.parameters["labels"], dtype=float)])
        np.save(sidecar, data)
    d = model.to_dict(sidecar=str(sidecar) if sidecar else None)
    if sidecar is not None:
        d["parameters"]["sidecar"] = {"path": sidecar.name,
                                      "sha256": hashlib.sha256(sidecar.read_bytes()).hexdigest()}
    path.write_text(json.dumps(d, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path


def load_model(path) -> ModelArtifact:
    path = Path(path)
    if not path.exists():
        raise InputNotFound(str(path))
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedModel(f"{path}: not JSON") from exc
    if d.get("format") != FORMAT:
        raise MalformedModel(f"{path}: unsupported format {d.get('format')!r}")
    try:
        params = dict(d["parameters"])
        if d["family"] == "knn":
            if "sidecar" in params:
                side = params.pop("sidecar")
                side_path = path.parent / side["path"]
                if not side_path.exists():
                    raise InputNotFound(str(side_path))
                if hashlib.sha256(side_path.read_bytes()).hexdigest() != side["sha256"]:
                    raise MalformedModel(f"{side_path}: content hash mismatch")
                data = np.load(side_path)
                params["train_matrix"], params["labels"] = data[:, :-1], data[:, -1].astype(int)
            else:
                params["train_matrix"] = np.asarray(params["train_matrix"], dtype=float)
                params["labels"] = np.asarray(params["labels"], dtype=int)
        model = ModelArtifact(d["family"], d["hyperparameters"], ScalingStats.from_dict(d["scaling"]),
                              params, d.get("training_meta", {}))
    except (KeyError, TypeError) as exc:
        raise MalformedModel(f"{path}: {exc}") from exc
    _check_model(model)
    return model
