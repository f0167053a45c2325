"""The ten metadata features and the supplement/meeting issue rule."""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .records import MergedRecord

FEATURE_NAMES = (
    "f1_has_abstract",
    "f2_title_word_count",
    "f3_page_count",
    "f4_author_count",
    "f5_has_license",
    "f6_citation_count",
    "f7_reference_count",
    "f8_has_funding",
    "f9_affiliation_count",
    "f10_has_oa_url",
)
BOOLEAN_FEATURES = ("f1_has_abstract", "f5_has_license", "f8_has_funding", "f10_has_oa_url")
NUMERIC_FEATURES = tuple(n for n in FEATURE_NAMES if n not in BOOLEAN_FEATURES)
NUMERIC_INDEX = tuple(FEATURE_NAMES.index(n) for n in NUMERIC_FEATURES)

# hyphen, en/em dash, unicode hyphens and minus
_PAGE_SEPARATOR = re.compile("[-\u2010\u2011\u2012\u2013\u2014\u2212]")
_DIGIT_RUN = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class FeatureVector:
    f1_has_abstract: bool
    f2_title_word_count: int
    f3_page_count: int
    f4_author_count: int
    f5_has_license: bool
    f6_citation_count: int
    f7_reference_count: int
    f8_has_funding: bool
    f9_affiliation_count: int
    f10_has_oa_url: bool

    def __post_init__(self):
        for name in NUMERIC_FEATURES:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([float(getattr(self, n)) for n in FEATURE_NAMES])

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureVector":
        return cls(**{n: (bool(d[n]) if n in BOOLEAN_FEATURES else int(d[n])) for n in FEATURE_NAMES})


@dataclass(frozen=True)
class IssueOverride:
    triggered: bool = False
    matched_token: Optional[str] = None

    def __post_init__(self):
        if self.triggered != (self.matched_token is not None):
            raise ValueError("matched_token must be set exactly when triggered")


def count_title_words(title: Optional[str]) -> int:
    if not title:
        return 0
    return len(title.split())


def clean_page_bound(bound: Optional[str]) -> Optional[int]:
    """Reduce a raw page bound to an integer: the last run of digits it contains.

    ``"S20"`` -> 20, ``"e1002345"`` -> 1002345, ``"xii"`` -> None.
    """
    if bound is None:
        return None
    runs = _DIGIT_RUN.findall(str(bound))
    return int(runs[-1]) if runs else None


def parse_page_count(page_field: Optional[str] = None, first_page: Optional[str] = None,
                     last_page: Optional[str] = None) -> int:
    """Absolute difference of the cleaned page bounds; 1 when either is unusable.

    Bounds come from ``first_page``/``last_page`` when either is given, otherwise from
    splitting ``page_field`` on its first hyphen-like separator. Equal bounds give 0.
    """
    if first_page is None and last_page is None and page_field:
        parts = _PAGE_SEPARATOR.split(page_field.strip(), maxsplit=1)
        first_page = parts[0]
        last_page = parts[1] if len(parts) == 2 else None
    first, last = clean_page_bound(first_page), clean_page_bound(last_page)
    if first is None or last is None:
        return 1
    return abs(last - first)


def issue_override(issue: Optional[str]) -> IssueOverride:
    if not issue:
        return IssueOverride()
    text = issue.lower()
    for token in ("sup", "meet"):
        if token in text:
            return IssueOverride(True, token)
    return IssueOverride()


def extract_features(record: MergedRecord) -> FeatureVector:
    cr, oa = record.crossref, record.openalex
    return FeatureVector(
        f1_has_abstract=cr.abstract_present,
        f2_title_word_count=count_title_words(cr.title),
        f3_page_count=parse_page_count(cr.page_field, cr.first_page, cr.last_page),
        f4_author_count=cr.author_count_raw,
        f5_has_license=cr.license_present,
        f6_citation_count=cr.citation_count,
        f7_reference_count=cr.reference_count,
        f8_has_funding=cr.funding_present,
        f9_affiliation_count=oa.affiliation_count if oa else 0,
        f10_has_oa_url=oa.oa_url_present if oa else False,
    )


def feature_row(record: MergedRecord) -> dict:
    """One line of the feature output file."""
    return {
        "key": record.key,
        **extract_features(record).as_dict(),
        "issue_override_triggered": issue_override(record.crossref.issue).triggered,
    }
