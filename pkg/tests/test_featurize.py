import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from doctypeclf.featurize import (FEATURE_NAMES, FeatureVector, IssueOverride, clean_page_bound,
                                  count_title_words, extract_features, feature_row, issue_override,
                                  parse_page_count)
from doctypeclf.harvest import merge_records, parse_crossref_work, parse_openalex_work
from doctypeclf.harvest.fixture_server import load_fixture
from doctypeclf.records import CrossrefWork, MergedRecord, OpenAlexWork


def trailing_digits_oracle(bound):
    """Walk the string backwards, skip non-digits, collect the last digit run."""
    digits = ""
    for ch in reversed(bound):
        if ch.isdigit() and ch.isascii():
            digits = ch + digits
        elif digits:
            break
    return int(digits) if digits else None


@pytest.mark.parametrize("title, n", [("A Study of Classifiers", 4), (None, 0), ("", 0),
                                      ("  Spaced   out\ttitle ", 3)])
def test_count_title_words(title, n):
    assert count_title_words(title) == n


@pytest.mark.parametrize("args, expected", [
    ((None, "100", "110"), 10),
    ((None, None, None), 1),
    (("S12-S20", None, None), 8),
    (("e1002345", None, None), 1),
    (("10-19", None, None), 9),
    (("123–130", None, None), 7),
    (("5-5", None, None), 0),
    (("xii-xiv", None, None), 1),
    ((None, "7", None), 1),
    (("1-9", "100", "110"), 10),
])
def test_parse_page_count(args, expected):
    assert parse_page_count(*args) == expected


def test_page_cleaning_matches_oracle_on_examples():
    for bound in ["S12", "S20", "e1002345", "12a", "A-3b4", "xii", "0123"]:
        assert clean_page_bound(bound) == trailing_digits_oracle(bound)


@given(st.text(alphabet="0123456789SAe.xi", max_size=8))
def test_page_cleaning_matches_oracle(bound):
    assert clean_page_bound(bound) == trailing_digits_oracle(bound)


@given(st.one_of(st.none(), st.text(max_size=8)), st.one_of(st.none(), st.text(max_size=8)))
def test_page_count_symmetric_and_nonnegative(a, b):
    assert parse_page_count(None, a, b) == parse_page_count(None, b, a)
    assert parse_page_count(None, a, b) >= 0


@pytest.mark.parametrize("issue, triggered, token", [
    ("Suppl 1", True, "sup"), ("Meeting Abstracts", True, "meet"), ("4", False, None),
    (None, False, None), ("SUPPLEMENT", True, "sup"), ("Supplement: Meeting", True, "sup"),
])
def test_issue_override(issue, triggered, token):
    assert issue_override(issue) == IssueOverride(triggered, token)


def test_issue_override_invariant():
    with pytest.raises(ValueError):
        IssueOverride(True, None)


def _fixture_record(doi):
    cr = next(parse_crossref_work(r) for r in load_fixture("crossref") if r["DOI"].lower() == doi)
    oa = [parse_openalex_work(r) for r in load_fixture("openalex") if (r.get("doi") or "").endswith(doi)]
    return next(merge_records([cr], oa))


def test_extract_full_record():
    fv = extract_features(_fixture_record("10.5555/fx.full"))
    assert fv == FeatureVector(True, 6, 9, 3, True, 5, 12, True, 2, True)


def test_extract_bare_record():
    fv = extract_features(_fixture_record("10.5555/fx.bare"))
    assert fv == FeatureVector(False, 0, 1, 0, False, 0, 0, False, 0, False)


def test_openalex_absence():
    rec = _fixture_record("10.5555/fx.full")
    without = MergedRecord(key=rec.key, crossref=rec.crossref)
    a, b = extract_features(rec), extract_features(without)
    assert (b.f9_affiliation_count, b.f10_has_oa_url) == (0, False)
    assert dataclasses.replace(b, f9_affiliation_count=a.f9_affiliation_count,
                               f10_has_oa_url=a.f10_has_oa_url) == a


texts = st.one_of(st.none(), st.text(max_size=12))


@given(title=texts, abstract=st.booleans(), page=texts, authors=st.integers(0, 50),
       lic=st.booleans(), cites=st.integers(0, 10**6), refs=st.integers(0, 500), fund=st.booleans(),
       issue=texts, affil=st.one_of(st.none(), st.integers(0, 30)), oa=st.booleans())
def test_extract_total_pure_presence_based(title, abstract, page, authors, lic, cites, refs, fund,
                                          issue, affil, oa):
    cr = CrossrefWork(key="10.1/a", title=title, abstract_present=abstract, page_field=page,
                      author_count_raw=authors, license_present=lic, citation_count=cites,
                      reference_count=refs, funding_present=fund, issue=issue)
    oaw = OpenAlexWork(key="10.1/a", affiliation_count=affil, oa_url_present=oa) if affil is not None else None
    rec = MergedRecord(key="10.1/a", crossref=cr, openalex=oaw)
    fv = extract_features(rec)
    assert fv == extract_features(rec)
    assert (fv.f1_has_abstract, fv.f5_has_license, fv.f8_has_funding) == (abstract, lic, fund)
    assert fv.f10_has_oa_url == (oa if oaw else False)
    assert all(getattr(fv, n) >= 0 for n in FEATURE_NAMES)


def test_feature_row_fields():
    row = feature_row(_fixture_record("10.5555/fx.full"))
    assert list(row) == ["key", *FEATURE_NAMES, "issue_override_triggered"]
    assert FeatureVector.from_dict(row).as_array().shape == (10,)
