"""Line-delimited record stores and the DOI-keyed merge."""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from ..errors import (DuplicateKeyInStore, EmptyTypeList, InputNotFound, MalformedRecord,
                      MissingDoi, ValidationError)
from ..records import CrossrefWork, MergedRecord, OpenAlexWork, PubMedRecord
from .parsers import parse_crossref_work, parse_openalex_work, parse_pubmed_record

logger = logging.getLogger(__name__)

_TYPES = {"crossref": CrossrefWork, "openalex": OpenAlexWork, "pubmed": PubMedRecord}
_PARSERS = {"crossref": parse_crossref_work, "openalex": parse_openalex_work,
            "pubmed": parse_pubmed_record}


def dumps(obj: dict) -> str:
    """Canonical JSON line: sorted keys, no whitespace, UTF-8 kept as is."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def record_to_dict(record) -> dict:
    if isinstance(record, MergedRecord):
        return {
            "source": "merged",
            "key": record.key,
            "crossref": _sub(record.crossref),
            "openalex": _sub(record.openalex),
            "pubmed": _sub(record.pubmed),
        }
    for source, cls in _TYPES.items():
        if isinstance(record, cls):
            return {"source": source, **_sub(record)}
    raise TypeError(f"not a record: {type(record).__name__}")


def _sub(record) -> Optional[dict]:
    if record is None:
        return None
    d = dataclasses.asdict(record)
    if "publication_types" in d:
        d["publication_types"] = list(d["publication_types"])
    return d


def record_from_dict(d: dict):
    source = d.get("source")
    try:
        if source == "merged":
            return MergedRecord(
                key=d["key"],
                crossref=CrossrefWork(**d["crossref"]),
                openalex=OpenAlexWork(**d["openalex"]) if d.get("openalex") else None,
                pubmed=PubMedRecord(**d["pubmed"]) if d.get("pubmed") else None,
            )
        if source in _TYPES:
            fields = {k: v for k, v in d.items() if k != "source"}
            return _TYPES[source](**fields)
    except (KeyError, TypeError) as exc:
        raise MalformedRecord(f"bad {source} record: {exc}") from exc
    raise MalformedRecord(f"unknown source tag {source!r}")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    path = Path(path)
    if not path.exists():
        raise InputNotFound(str(path))
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(dumps(row) + "\n")
            n += 1
    return n


def read_store(path: str | Path) -> Iterator:
    for d in read_jsonl(path):
        yield record_from_dict(d)


@dataclass
class HarvestStats:
    fetched: int = 0
    written: int = 0
    skipped: dict = field(default_factory=dict)


def write_store(path: str | Path, source: str, raw_records: Iterable[dict],
                append: bool = False) -> HarvestStats:
    """Parse raw API records and persist them, one per line.

    Records without a usable DOI (or with another per-record defect) are skipped
    and counted. A key seen twice keeps its last occurrence; with ``append`` the
    existing store takes part in that rule.
    """
    stats = HarvestStats()
    by_key: dict[str, dict] = {}
    if append and Path(path).exists():
        for d in read_jsonl(path):
            by_key[d["key"]] = d
    parse = _PARSERS[source]
    for raw in raw_records:
        stats.fetched += 1
        try:
            rec = parse(raw)
        except (MissingDoi, EmptyTypeList, MalformedRecord, ValidationError) as exc:
            name = type(exc).__name__
            stats.skipped[name] = stats.skipped.get(name, 0) + 1
            logger.debug("skipping %s record: %s", source, exc)
            continue
        d = record_to_dict(rec)
        by_key.pop(d["key"], None)  # re-insert so order reflects the last write
        by_key[d["key"]] = d
    stats.written = write_jsonl(path, by_key.values())
    return stats


@dataclass
class MergeStats:
    crossref: int = 0
    openalex_matched: int = 0
    openalex_unmatched: int = 0
    pubmed_matched: int = 0
    pubmed_unmatched: int = 0

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _index(records: Iterable, source: str) -> dict:
    out = {}
    for rec in records:
        if rec.key in out:
            raise DuplicateKeyInStore(f"{source} store holds {rec.key} twice")
        out[rec.key] = rec
    return out


def merge_records(crossref: Iterable[CrossrefWork], openalex: Iterable[OpenAlexWork] = (),
                  pubmed: Iterable[PubMedRecord] = (),
                  stats: Optional[MergeStats] = None) -> Iterator[MergedRecord]:
    """Join records on DOI with Crossref as the spine, ascending by key.

    Pass a :class:`MergeStats` to collect matched/unmatched counts. Inputs may be
    store paths' record iterators or in-memory sequences.
    """
    cr = _index(crossref, "crossref")
    oa = _index(openalex, "openalex")
    pm = _index(pubmed, "pubmed")
    if stats is not None:
        stats.crossref = len(cr)
        stats.openalex_matched = sum(1 for k in oa if k in cr)
        stats.openalex_unmatched = len(oa) - stats.openalex_matched
        stats.pubmed_matched = sum(1 for k in pm if k in cr)
        stats.pubmed_unmatched = len(pm) - stats.pubmed_matched
    for key in sorted(cr):
        yield MergedRecord(key=key, crossref=cr[key], openalex=oa.get(key), pubmed=pm.get(key))


def merge_stores(crossref_store, openalex_store=None, pubmed_store=None,
                 stats: Optional[MergeStats] = None) -> Iterator[MergedRecord]:
    return merge_records(
        read_store(crossref_store),
        read_store(openalex_store) if openalex_store else (),
        read_store(pubmed_store) if pubmed_store else (),
        stats=stats,
    )
