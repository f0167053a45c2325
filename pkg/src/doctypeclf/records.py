"""Shared domain types and DOI normalization."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import MalformedDoi, ValidationError

_RESOLVER_PREFIX = re.compile(r"^(?:https?://(?:dx\.)?doi\.org/|doi:\s*)", re.IGNORECASE)


def normalize_doi(raw: str) -> str:
    """Return the canonical lowercase form of a DOI.

    Resolver prefixes (``https://doi.org/``, ``http://dx.doi.org/``, ``doi:``)
    and surrounding whitespace are removed.

    >>> normalize_doi("https://doi.org/10.1000/ABC")
    '10.1000/abc'
    """
    if raw is None or not str(raw).strip():
        raise MalformedDoi("empty DOI")
    doi = _RESOLVER_PREFIX.sub("", str(raw).strip()).strip().lower()
    if not doi.startswith("10.") or "/" not in doi or re.search(r"\s", doi):
        raise MalformedDoi(f"not a DOI: {raw!r}")
    return doi


class Label(str, enum.Enum):
    RESEARCH = "research"
    NON_RESEARCH = "non-research"

    @property
    def as_int(self) -> int:
        # 1 marks the positive (non-research) class; scores are P(non-research)
        return 1 if self is Label.NON_RESEARCH else 0

    @classmethod
    def from_int(cls, value: int) -> "Label":
        return cls.NON_RESEARCH if value else cls.RESEARCH


def _check_count(name: str, value: int) -> None:
    if value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class CrossrefWork:
    key: str
    title: Optional[str] = None
    abstract_present: bool = False
    page_field: Optional[str] = None
    first_page: Optional[str] = None
    last_page: Optional[str] = None
    author_count_raw: int = 0
    license_present: bool = False
    citation_count: int = 0
    reference_count: int = 0
    funding_present: bool = False
    issue: Optional[str] = None
    publisher: str = ""
    container_title: Optional[str] = None
    published_year: Optional[int] = None
    source_doc_type: str = ""

    def __post_init__(self):
        _check_count("citation_count", self.citation_count)
        _check_count("reference_count", self.reference_count)
        _check_count("author_count_raw", self.author_count_raw)
        if self.published_year is not None and not 1000 <= self.published_year <= 2100:
            raise ValidationError(f"published_year out of range: {self.published_year}")


@dataclass(frozen=True)
class OpenAlexWork:
    key: str
    affiliation_count: int = 0
    oa_url_present: bool = False
    source_type: str = ""
    oal_doc_type: str = ""
    publication_year: Optional[int] = None

    def __post_init__(self):
        _check_count("affiliation_count", self.affiliation_count)


@dataclass(frozen=True)
class PubMedRecord:
    key: str
    pmid: str
    publication_types: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.publication_types:
            raise ValidationError("publication_types must be non-empty")
        # accept lists from deserialization but store immutably
        object.__setattr__(self, "publication_types", tuple(self.publication_types))


@dataclass(frozen=True)
class MergedRecord:
    key: str
    crossref: CrossrefWork
    openalex: Optional[OpenAlexWork] = None
    pubmed: Optional[PubMedRecord] = None

    def __post_init__(self):
        for sub in (self.crossref, self.openalex, self.pubmed):
            if sub is not None and sub.key != self.key:
                raise ValidationError(f"sub-record key {sub.key} != {self.key}")


@dataclass(frozen=True)
class Prediction:
    """Model output for one work; ``score`` is the confidence that it is non-research."""

    key: str
    label: Label
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"score out of [0, 1]: {self.score}")
