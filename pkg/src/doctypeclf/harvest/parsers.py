"""Parse raw API payloads into domain records.

Parsers ignore fields they do not consume and are strict about the ones they do.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Any, Iterator, Optional

from ..errors import ApiSchemaError, EmptyTypeList, MalformedDoi, MalformedRecord, MissingDoi
from ..records import CrossrefWork, OpenAlexWork, PubMedRecord, normalize_doi


def _key(raw_doi: Any) -> str:
    if not raw_doi:
        raise MissingDoi("record has no DOI")
    try:
        return normalize_doi(raw_doi)
    except MalformedDoi as exc:
        raise MissingDoi(str(exc)) from exc


def _first(value: Any) -> Optional[str]:
    # Crossref wraps title/container-title in single-element lists
    if isinstance(value, list):
        value = value[0] if value else None
    if value is None:
        return None
    return str(value)


def _count(raw: dict, name: str) -> int:
    value = raw.get(name, 0)
    if value is None:
        return 0
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise MalformedRecord(f"{name} is not a non-negative integer: {value!r}")
    return value


def _crossref_year(raw: dict) -> Optional[int]:
    for field in ("published", "published-print", "published-online", "issued"):
        parts = (raw.get(field) or {}).get("date-parts") or []
        if parts and parts[0] and parts[0][0] is not None:
            year = int(parts[0][0])
            return year if 1000 <= year <= 2100 else None
    return None


def parse_crossref_work(raw: dict) -> CrossrefWork:
    """Map one Crossref ``work`` message onto a :class:`CrossrefWork`."""
    key = _key(raw.get("DOI"))
    title = _first(raw.get("title"))
    if title is None and not raw.get("type"):
        raise MalformedRecord(f"{key}: neither title nor type present")
    authors = raw.get("author") or []
    if not isinstance(authors, list):
        raise MalformedRecord(f"{key}: author is not a list")
    abstract = raw.get("abstract")
    return CrossrefWork(
        key=key,
        title=title,
        abstract_present=bool(abstract and str(abstract).strip()),
        page_field=raw.get("page"),
        first_page=None,
        last_page=None,
        author_count_raw=len(authors),
        license_present=bool(raw.get("license")),
        citation_count=_count(raw, "is-referenced-by-count"),
        reference_count=_count(raw, "reference-count"),
        funding_present=bool(raw.get("funder")),
        issue=raw.get("issue"),
        publisher=raw.get("publisher") or "",
        container_title=_first(raw.get("container-title")),
        published_year=_crossref_year(raw),
        source_doc_type=raw.get("type") or "",
    )


def parse_openalex_work(raw: dict) -> OpenAlexWork:
    """Map one OpenAlex work object onto an :class:`OpenAlexWork`.

    Affiliations are counted as distinct institution ids across all authorships.
    """
    key = _key(raw.get("doi"))
    institutions = set()
    for authorship in raw.get("authorships") or []:
        for inst in authorship.get("institutions") or []:
            if inst.get("id"):
                institutions.add(inst["id"])
    oa_url = (raw.get("open_access") or {}).get("oa_url")
    source = ((raw.get("primary_location") or {}).get("source")) or {}
    year = raw.get("publication_year")
    return OpenAlexWork(
        key=key,
        affiliation_count=len(institutions),
        oa_url_present=bool(oa_url),
        source_type=source.get("type") or "",
        oal_doc_type=raw.get("type") or "",
        publication_year=int(year) if year is not None else None,
    )


def parse_pubmed_record(raw: dict) -> PubMedRecord:
    """Map a PubMed citation dict (``pmid``, ``doi``, ``publication_types``)."""
    key = _key(raw.get("doi"))
    types = list(raw.get("publication_types") or [])
    if not types:
        raise EmptyTypeList(f"{key}: no publication types")
    return PubMedRecord(key=key, pmid=str(raw.get("pmid", "")), publication_types=tuple(types))


def iter_pubmed_xml(payload: bytes | str) -> Iterator[dict]:
    """Yield raw citation dicts from an efetch ``PubmedArticleSet`` document."""
    try:
        root = ET.fromstring(payload)
    except ET.ParseError as exc:
        raise ApiSchemaError(f"efetch response is not XML: {exc}") from exc
    for article in root.iter("PubmedArticle"):
        pmid = article.findtext("MedlineCitation/PMID") or ""
        doi = None
        for aid in article.iter("ArticleId"):
            if aid.get("IdType") == "doi" and aid.text:
                doi = aid.text.strip()
                break
        if doi is None:
            for eloc in article.iter("ELocationID"):
                if eloc.get("EIdType") == "doi" and eloc.text:
                    doi = eloc.text.strip()
                    break
        types = [pt.text.strip() for pt in article.iter("PublicationType") if pt.text]
        yield {"pmid": pmid, "doi": doi, "publication_types": types}
