"""Paged harvesting from the Crossref, OpenAlex and PubMed public APIs.

Crossref and OpenAlex use cursor paging; PubMed uses an E-utilities history
session with offset paging. All requests go through one rate limiter and a
bounded retry loop with exponential backoff.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

import requests

from .. import __version__
from ..errors import ApiSchemaError, NetworkError, RateLimited, ValidationError
from .parsers import iter_pubmed_xml

logger = logging.getLogger(__name__)

SOURCES = ("crossref", "openalex", "pubmed")

DEFAULT_BASE_URLS = {
    "crossref": "https://api.crossref.org",
    "openalex": "https://api.openalex.org",
    "pubmed": "https://eutils.ncbi.nlm.nih.gov/entrez/eutils",
}
BASE_URL_ENV = {
    "crossref": "CROSSREF_BASE_URL",
    "openalex": "OPENALEX_BASE_URL",
    "pubmed": "PUBMED_BASE_URL",
}
# API maxima: Crossref rows<=1000, OpenAlex per-page<=200, efetch retmax up to 10000
DEFAULT_PAGE_SIZE = {"crossref": 1000, "openalex": 200, "pubmed": 500}


@dataclass(frozen=True)
class HarvestFilter:
    source: str
    year_from: int
    year_to: int
    container_type: Optional[str] = "journal"
    extra: tuple[str, ...] = ()

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValidationError(f"unknown source {self.source!r}")
        if self.year_from > self.year_to:
            raise ValidationError("year_from must be <= year_to")
        for pair in self.extra:
            if "=" not in pair:
                raise ValidationError(f"extra filter must be key=value: {pair!r}")


@dataclass
class HarvestConfig:
    mailto: str
    base_urls: dict = field(default_factory=lambda: dict(DEFAULT_BASE_URLS))
    requests_per_second: float = 2.0
    max_attempts: int = 5
    backoff_base: float = 1.0
    timeout: float = 30.0
    page_size: Optional[int] = None

    @classmethod
    def from_env(cls, **overrides) -> "HarvestConfig":
        mailto = overrides.pop("mailto", None) or os.environ.get("CONTACT_MAILTO", "")
        if not mailto:
            raise ValidationError("CONTACT_MAILTO must be set for polite API usage")
        base_urls = {
            src: os.environ.get(env) or DEFAULT_BASE_URLS[src]
            for src, env in BASE_URL_ENV.items()
        }
        return cls(mailto=mailto, base_urls=base_urls, **overrides)


class RateLimiter:
    """Enforces a minimum interval between request starts; thread-safe."""

    def __init__(self, requests_per_second: float):
        self.interval = 1.0 / requests_per_second if requests_per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next = 0.0

    def wait(self) -> None:
        with self._lock:
            now = time.monotonic()
            delay = self._next - now
            self._next = max(now, self._next) + self.interval
        if delay > 0:
            time.sleep(delay)


class _Requester:
    def __init__(self, config: HarvestConfig, session: Optional[requests.Session] = None):
        self.config = config
        self.limiter = RateLimiter(config.requests_per_second)
        self.session = session or requests.Session()
        self.session.headers["User-Agent"] = f"doctypeclf/{__version__} (mailto:{config.mailto})"

    def get(self, url: str, params: dict) -> requests.Response:
        last_status = None
        for attempt in range(1, self.config.max_attempts + 1):
            self.limiter.wait()
            try:
                resp = self.session.get(url, params=params, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_status = f"{type(exc).__name__}: {exc}"
                logger.warning("request failed (%d/%d): %s", attempt, self.config.max_attempts, exc)
            else:
                if resp.status_code == 200:
                    return resp
                last_status = resp.status_code
                if resp.status_code != 429 and resp.status_code < 500:
                    raise NetworkError(f"GET {resp.url} -> HTTP {resp.status_code}")
                logger.warning("HTTP %s from %s (%d/%d)", resp.status_code, url, attempt, self.config.max_attempts)
            if attempt < self.config.max_attempts:
                time.sleep(self.config.backoff_base * 2 ** (attempt - 1))
        if last_status == 429:
            raise RateLimited(f"{url}: still rate limited after {self.config.max_attempts} attempts")
        raise NetworkError(f"{url}: giving up after {self.config.max_attempts} attempts ({last_status})")

    def get_json(self, url: str, params: dict) -> dict:
        resp = self.get(url, params)
        try:
            return resp.json()
        except ValueError as exc:
            raise ApiSchemaError(f"{url}: response is not JSON") from exc


def _extra_pairs(flt: HarvestFilter) -> list[tuple[str, str]]:
    return [tuple(pair.split("=", 1)) for pair in flt.extra]


def _crossref_pages(req: _Requester, flt: HarvestFilter, page_size: int) -> Iterator[list]:
    filters = [f"from-pub-date:{flt.year_from}-01-01", f"until-pub-date:{flt.year_to}-12-31"]
    if flt.container_type == "journal":
        filters.append("type:journal-article")
    filters += [f"{k}:{v}" for k, v in _extra_pairs(flt)]
    url = req.config.base_urls["crossref"].rstrip("/") + "/works"
    cursor = "*"
    while True:
        body = req.get_json(url, {"filter": ",".join(filters), "rows": page_size,
                                  "cursor": cursor, "mailto": req.config.mailto})
        message = body.get("message") if isinstance(body, dict) else None
        if not isinstance(message, dict) or not isinstance(message.get("items"), list):
            raise ApiSchemaError("Crossref response lacks message.items")
        items = message["items"]
        if not items:
            return
        yield items
        next_cursor = message.get("next-cursor")
        if not next_cursor or next_cursor == cursor:
            return
        cursor = next_cursor


def _openalex_pages(req: _Requester, flt: HarvestFilter, page_size: int) -> Iterator[list]:
    filters = [f"from_publication_date:{flt.year_from}-01-01",
               f"to_publication_date:{flt.year_to}-12-31"]
    if flt.container_type:
        filters.append(f"primary_location.source.type:{flt.container_type}")
    filters += [f"{k}:{v}" for k, v in _extra_pairs(flt)]
    url = req.config.base_urls["openalex"].rstrip("/") + "/works"
    cursor = "*"
    while cursor:
        body = req.get_json(url, {"filter": ",".join(filters), "per-page": page_size,
                                  "cursor": cursor, "mailto": req.config.mailto})
        if not isinstance(body, dict) or not isinstance(body.get("results"), list) \
                or not isinstance(body.get("meta"), dict):
            raise ApiSchemaError("OpenAlex response lacks meta/results")
        if not body["results"]:
            return
        yield body["results"]
        cursor = body["meta"].get("next_cursor")


def _pubmed_pages(req: _Requester, flt: HarvestFilter, page_size: int) -> Iterator[list]:
    base = req.config.base_urls["pubmed"].rstrip("/")
    terms = [f"{flt.year_from}:{flt.year_to}[dp]"]
    if flt.container_type == "journal":
        terms.append("journal article[pt]")
    terms += [f"{v}[{k}]" for k, v in _extra_pairs(flt)]
    common = {"db": "pubmed", "tool": "doctypeclf", "email": req.config.mailto}
    search = req.get_json(f"{base}/esearch.fcgi", {**common, "term": " AND ".join(terms),
                                                   "usehistory": "y", "retmode": "json",
                                                   "retmax": 0})
    result = search.get("esearchresult") if isinstance(search, dict) else None
    if not isinstance(result, dict) or "count" not in result or "webenv" not in result:
        raise ApiSchemaError("esearch response lacks esearchresult.count/webenv")
    total = int(result["count"])
    retstart = 0
    while retstart < total:
        resp = req.get(f"{base}/efetch.fcgi", {**common, "WebEnv": result["webenv"],
                                               "query_key": result.get("querykey", "1"),
                                               "retstart": retstart, "retmax": page_size,
                                               "retmode": "xml"})
        items = list(iter_pubmed_xml(resp.content))
        if not items:
            return
        yield items
        retstart += len(items)


_PAGERS = {"crossref": _crossref_pages, "openalex": _openalex_pages, "pubmed": _pubmed_pages}


def fetch_pages(flt: HarvestFilter, page_limit: Optional[int] = None,
                config: Optional[HarvestConfig] = None,
                session: Optional[requests.Session] = None) -> Iterator[dict]:
    """Yield raw records for ``flt``, stopping after ``page_limit`` pages if given.

    PubMed pages are decoded from efetch XML into ``{pmid, doi, publication_types}``
    dicts; Crossref and OpenAlex records are yielded as returned by the API.
    """
    if page_limit is not None and page_limit <= 0:
        return
    config = config or HarvestConfig.from_env()
    if not config.mailto:
        raise ValidationError("a contact e-mail is required for polite API usage")
    req = _Requester(config, session)
    page_size = config.page_size or DEFAULT_PAGE_SIZE[flt.source]
    for n, page in enumerate(_PAGERS[flt.source](req, flt, page_size), start=1):
        logger.debug("%s page %d: %d records", flt.source, n, len(page))
        yield from page
        if page_limit is not None and n >= page_limit:
            return
