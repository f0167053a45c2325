"""File-level glue between stages: readers for the feature, label and split files."""

from __future__ import annotations

from typing import Optional

from .errors import ValidationError
from .featurize import FeatureVector
from .harvest.store import read_jsonl, read_store
from .label import LabeledExample
from .records import Label


def load_features(path) -> dict:
    """``key -> (FeatureVector, issue_override_triggered)``."""
    out = {}
    for row in read_jsonl(path):
        try:
            out[row["key"]] = (FeatureVector.from_dict(row), bool(row["issue_override_triggered"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}: bad feature row for {row.get('key')}: {exc}") from exc
    return out


def load_labels(path) -> dict:
    out = {}
    for row in read_jsonl(path):
        try:
            out[row["key"]] = Label(row["label"])
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"{path}: bad label row: {row}") from exc
    return out


def load_splits(path) -> dict:
    out = {}
    for row in read_jsonl(path):
        if row.get("split") not in ("train", "test", "validation"):
            raise ValidationError(f"{path}: bad split row: {row}")
        out[row["key"]] = row["split"]
    return out


def build_examples(features: dict, labels: dict, merged_path: Optional[str] = None) -> list[LabeledExample]:
    """Join features and labels on key; publisher and year come from the merged store."""
    meta = {}
    if merged_path:
        for rec in read_store(merged_path):
            meta[rec.key] = (rec.crossref.publisher, rec.crossref.published_year)
    examples = []
    for key in sorted(labels):
        if key not in features:
            raise ValidationError(f"label for {key} has no feature row")
        publisher, year = meta.get(key, ("", None))
        examples.append(LabeledExample(key, features[key][0], labels[key], publisher, year))
    return examples
