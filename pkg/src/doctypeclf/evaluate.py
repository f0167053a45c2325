"""Confusion matrices, per-class and support-weighted metrics, corpus reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import KeyMismatch, ValidationError
from .featurize import IssueOverride
from .records import Label, Prediction

CLASSES = (Label.RESEARCH, Label.NON_RESEARCH)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed ``[true][predicted]`` over (research, non-research)."""

    rr: int = 0  # true research, predicted research
    rn: int = 0  # true research, predicted non-research
    nr: int = 0  # true non-research, predicted research
    nn: int = 0  # true non-research, predicted non-research

    @property
    def total(self) -> int:
        return self.rr + self.rn + self.nr + self.nn

    def as_tuple(self) -> tuple:
        return (self.rr, self.rn, self.nr, self.nn)

    def counts(self, cls: Label) -> tuple[int, int, int]:
        """(TP, FP, FN) with ``cls`` as the positive class."""
        if cls is Label.RESEARCH:
            return self.rr, self.nr, self.rn
        return self.nn, self.rn, self.nr


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    zero_division: bool = False


@dataclass
class EvalReport:
    split: str
    model: str
    confusion: ConfusionMatrix
    per_class: dict
    weighted: dict
    n: int = 0

    def as_dict(self) -> dict:
        return {
            "split": self.split,
            "model": self.model,
            "n": self.n,
            "confusion": asdict(self.confusion),
            "per_class": {c.value: asdict(m) for c, m in self.per_class.items()},
            "weighted": dict(self.weighted),
        }


def _truth_map(truth) -> dict:
    out = {}
    for t in truth:
        key, label = (t.key, t.label) if hasattr(t, "label") else t
        out[key] = label
    return out


def confusion(predictions: Sequence[Prediction], truth) -> ConfusionMatrix:
    """Count outcomes; ``truth`` holds LabeledExamples or ``(key, Label)`` pairs."""
    t = _truth_map(truth)
    p = {pr.key: pr.label for pr in predictions}
    if set(t) != set(p) or len(p) != len(predictions):
        raise KeyMismatch(f"{len(set(p) ^ set(t))} keys differ between predictions and truth")
    c = Counter((t[k], p[k]) for k in p)
    R, N = Label.RESEARCH, Label.NON_RESEARCH
    return ConfusionMatrix(rr=c[(R, R)], rn=c[(R, N)], nr=c[(N, R)], nn=c[(N, N)])


def f1_score(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def class_metrics(cm: ConfusionMatrix, cls: Label) -> ClassMetrics:
    tp, fp, fn = cm.counts(cls)
    zero = tp + fp == 0 or tp + fn == 0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return ClassMetrics(precision, recall, f1_score(precision, recall), tp + fn, zero)


def weighted_metrics(per_class: Mapping[Label, ClassMetrics]) -> tuple[float, float, float]:
    """Support-weighted mean of precision, recall and F1 over the classes."""
    total = sum(m.support for m in per_class.values())
    if total <= 0:
        raise ValidationError("weighted metrics need positive total support")
    out = []
    for attr in ("precision", "recall", "f1"):
        out.append(sum(m.support / total * getattr(m, attr) for m in per_class.values()))
    return tuple(out)


def evaluate(predictions: Sequence[Prediction], truth, split: str = "", model: str = "") -> EvalReport:
    cm = confusion(predictions, truth)
    per_class = {c: class_metrics(cm, c) for c in CLASSES}
    p, r, f = weighted_metrics(per_class)
    return EvalReport(split=split, model=model, confusion=cm, per_class=per_class,
                      weighted={"precision": p, "recall": r, "f1": f}, n=cm.total)


@dataclass
class CorpusReport:
    total: int = 0
    non_research: int = 0
    non_research_model: int = 0
    override_triggered: int = 0
    group_field: Optional[str] = None
    groups: dict = field(default_factory=dict)

    @property
    def non_research_share(self) -> float:
        return self.non_research / self.total if self.total else 0.0

    @property
    def override_share(self) -> float:
        return self.override_triggered / self.total if self.total else 0.0

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "non_research": self.non_research,
            "non_research_share": self.non_research_share,
            "non_research_before_override": self.non_research_model,
            "override_triggered": self.override_triggered,
            "override_share": self.override_share,
            "group_field": self.group_field,
            "groups": {g: dict(v, non_research_share=v["non_research"] / v["total"])
                       for g, v in sorted(self.groups.items())},
        }


def apply_override(prediction: Prediction, override: IssueOverride) -> Label:
    return Label.NON_RESEARCH if override.triggered else prediction.label


def corpus_report(predictions: Sequence[Prediction], overrides: Mapping[str, IssueOverride],
                  groups: Optional[Mapping[str, str]] = None,
                  group_field: Optional[str] = None) -> CorpusReport:
    """Tally final labels after the issue rule, overall and per group.

    ``overrides`` and ``groups`` are keyed by work key; the override key set must
    match the predictions exactly.
    """
    keys = [p.key for p in predictions]
    if set(keys) != set(overrides) or len(set(keys)) != len(keys):
        raise KeyMismatch("overrides are not aligned with predictions")
    if groups is not None and not set(keys) <= set(groups):
        raise KeyMismatch("group values missing for some predictions")
    rep = CorpusReport(group_field=group_field)
    for p in predictions:
        ov = overrides[p.key]
        final = apply_override(p, ov)
        rep.total += 1
        rep.non_research_model += p.label is Label.NON_RESEARCH
        rep.non_research += final is Label.NON_RESEARCH
        rep.override_triggered += ov.triggered
        if groups is not None:
            g = rep.groups.setdefault(str(groups[p.key]), {"total": 0, "non_research": 0})
            g["total"] += 1
            g["non_research"] += final is Label.NON_RESEARCH
    return rep


def render_table(reports: Sequence[EvalReport]) -> str:
    """Plain-text tables shaped like the overall and per-class result tables."""
    names = list(dict.fromkeys(r.model for r in reports))
    width = max([10] + [len(n) for n in names]) + 2
    head = f"{'':<14}{'Measure':<11}" + "".join(f"{n:>{width}}" for n in names)
    lines = [head, "-" * len(head)]
    splits = sorted({r.split for r in reports}, key=lambda s: (s != "test", s))
    for split in splits:
        rs = [r for r in reports if r.split == split]
        for i, m in enumerate(("precision", "recall", "f1")):
            lines.append(f"{split if i == 0 else '':<14}{m:<11}" +
                         "".join(f"{r.weighted[m]:>{width}.4f}" for r in rs))
    lines.append("")
    lines.append(head)
    lines.append("-" * len(head))
    first = [r for r in reports if r.split == splits[0]] if splits else []
    for cls in CLASSES:
        for i, m in enumerate(("precision", "recall", "f1")):
            lines.append(f"{cls.value if i == 0 else '':<14}{m:<11}" +
                         "".join(f"{getattr(r.per_class[cls], m):>{width}.4f}" for r in first))
    return "\n".join(lines)
