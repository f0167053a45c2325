"""Binary research / non-research labels from PubMed publication types."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import DuplicateType, InputNotFound, UnknownClass, ValidationError
from .featurize import FeatureVector
from .records import Label

_CLASS_NAMES = {"research": Label.RESEARCH, "non-research": Label.NON_RESEARCH}


class _Unmappable:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNMAPPABLE"

    value = "unmappable"


UNMAPPABLE = _Unmappable()


@dataclass(frozen=True)
class TypeMapping:
    entries: dict
    generic_types: frozenset = frozenset({"Journal Article"})

    def __post_init__(self):
        for t, lab in self.entries.items():
            if not isinstance(lab, Label):
                raise UnknownClass(f"{t!r} maps to {lab!r}")


@dataclass(frozen=True)
class LabeledExample:
    key: str
    features: FeatureVector
    label: Label
    publisher: str = ""
    year: Optional[int] = None


def _parse_mapping(text: str, source: str, generic_types: Iterable[str]) -> TypeMapping:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header[:2]] != ["pubmed_type", "class"]:
        raise ValidationError(f"{source}: expected header 'pubmed_type,class'")
    entries = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise ValidationError(f"{source}:{lineno}: expected 2 columns, got {len(row)}")
        ptype, cls = row[0].strip(), row[1].strip().lower()
        if cls not in _CLASS_NAMES:
            raise UnknownClass(f"{source}:{lineno}: {cls!r} is neither research nor non-research")
        if ptype in entries:
            raise DuplicateType(f"{source}:{lineno}: {ptype!r} listed twice")
        entries[ptype] = _CLASS_NAMES[cls]
    return TypeMapping(entries=entries, generic_types=frozenset(generic_types))


def load_mapping(path: Union[str, Path, None] = None,
                 generic_types: Iterable[str] = ("Journal Article",)) -> TypeMapping:
    """Load a ``pubmed_type,class`` CSV; ``None`` loads the bundled default table.

    The bundled table approximates the original study's mapping; align it with your
    own table when exact agreement matters.
    """
    if path is None:
        text = resources.files("doctypeclf").joinpath("data/pubmed_type_mapping.csv").read_text("utf-8")
        return _parse_mapping(text, "default mapping", generic_types)
    path = Path(path)
    if not path.exists():
        raise InputNotFound(str(path))
    return _parse_mapping(path.read_text(encoding="utf-8"), str(path), generic_types)


def explain_label(types: Iterable[str], mapping: TypeMapping):
    """Return ``(label_or_UNMAPPABLE, matched_types)``.

    Specific (non-generic) types beat generic ones; among specific types a single
    non-research match wins.
    """
    types = list(types)
    specific = [t for t in types if t in mapping.entries and t not in mapping.generic_types]
    generic = [t for t in types if t in mapping.entries and t in mapping.generic_types]
    for wanted in (Label.NON_RESEARCH, Label.RESEARCH):
        hits = sorted(t for t in specific if mapping.entries[t] is wanted)
        if hits:
            return wanted, hits
    if generic:
        classes = {mapping.entries[t] for t in generic}
        wanted = Label.NON_RESEARCH if Label.NON_RESEARCH in classes else Label.RESEARCH
        return wanted, sorted(t for t in generic if mapping.entries[t] is wanted)
    return UNMAPPABLE, []


def assign_label(types: Iterable[str], mapping: TypeMapping):
    return explain_label(types, mapping)[0]
