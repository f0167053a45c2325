from .client import HarvestConfig, HarvestFilter, RateLimiter, fetch_pages
from .parsers import iter_pubmed_xml, parse_crossref_work, parse_openalex_work, parse_pubmed_record
from .store import (MergeStats, merge_records, merge_stores, read_jsonl, read_store,
                    record_from_dict, record_to_dict, write_jsonl, write_store)

__all__ = [
    "HarvestConfig", "HarvestFilter", "RateLimiter", "fetch_pages",
    "iter_pubmed_xml", "parse_crossref_work", "parse_openalex_work", "parse_pubmed_record",
    "MergeStats", "merge_records", "merge_stores", "read_jsonl", "read_store",
    "record_from_dict", "record_to_dict", "write_jsonl", "write_store",
]
