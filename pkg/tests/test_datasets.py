import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_examples, make_fv, random_examples
from doctypeclf.datasets import (ScalingStats, allocate_split_counts, apply_scaling, as_matrix,
                                 filter_small_publishers, fit_scaling, stratified_split)
from doctypeclf.errors import EmptyClass, ValidationError
from doctypeclf.featurize import NUMERIC_INDEX
from doctypeclf.harvest import parse_crossref_work
from doctypeclf.harvest.fixture_server import load_fixture
from doctypeclf.label import LabeledExample
from doctypeclf.records import Label


def _with_publishers(counts):
    out = []
    for pub, n in counts.items():
        out += random_examples(n, 0.9, seed=len(out), publisher=pub)
    return out


def test_filter_threshold():
    ex = _with_publishers({"P": 6000, "Q": 4999})
    stats = {}
    kept = filter_small_publishers(ex, 5000, stats)
    assert {e.publisher for e in kept} == {"P"} and len(kept) == 6000
    assert stats["removed"] == 4999


def test_filter_zero_is_identity():
    ex = _with_publishers({"P": 3, "Q": 1})
    assert filter_small_publishers(ex, 0) == ex


def test_filter_fixture_corpus_against_count_oracle():
    works = [parse_crossref_work(r) for r in load_fixture("crossref")]
    ex = [LabeledExample(w.key, make_fv([0] * 10), Label.RESEARCH, w.publisher) for w in works]
    # independent one-line group count over the raw fixture
    big = {p for p, n in Counter(r.get("publisher") for r in load_fixture("crossref")).items() if n >= 100}
    kept = filter_small_publishers(ex, 100)
    assert {e.key for e in kept} == {w.key for w in works if w.publisher in big}
    assert 0 < len(kept) < len(ex)


def test_allocation_example():
    # largest-remainder split totals 800/100/100; cells are floors/ceilings of 0.8/0.1/0.1 quotas
    assert allocate_split_counts([926, 74], (0.8, 0.1, 0.1)) == [[741, 93, 92], [59, 7, 8]]


def test_split_example():
    ex = random_examples(1000, 0.926, seed=1)
    sa = stratified_split(ex, (0.8, 0.1, 0.1), seed=42)
    label = {e.key: e.label for e in ex}
    got = Counter((sa.assignment[k], label[k]) for k in label)
    R, N = Label.RESEARCH, Label.NON_RESEARCH
    assert [got[("train", R)], got[("train", N)]] == [741, 59]
    assert [got[("test", R)], got[("test", N)]] == [93, 7]
    assert [got[("validation", R)], got[("validation", N)]] == [92, 8]


def test_split_single_class():
    ex = random_examples(10, 1.0, seed=0)
    with pytest.raises(EmptyClass):
        stratified_split(ex, (0.8, 0.1, 0.1), 0)


def test_split_bad_ratios():
    with pytest.raises(ValidationError):
        stratified_split(random_examples(10, 0.5, 0), (0.8, 0.1, 0.2), 0)


def test_split_permutation_and_seed():
    ex = random_examples(300, 0.8, seed=5)
    a = stratified_split(ex, seed=7)
    b = stratified_split(list(reversed(ex)), seed=7)
    assert a.rows() == b.rows()
    assert stratified_split(ex, seed=8).rows() != a.rows()


@settings(max_examples=60, deadline=None)
@given(n_res=st.integers(1, 400), n_non=st.integers(1, 400),
       ratios=st.sampled_from([(0.8, 0.1, 0.1), (0.7, 0.15, 0.15), (0.6, 0.2, 0.2), (0.5, 0.25, 0.25)]),
       seed=st.integers(0, 2**31))
def test_split_properties(n_res, n_non, ratios, seed):
    n = n_res + n_non
    ex = make_examples(np.zeros((n, 10)), [0] * n_res + [1] * n_non)
    sa = stratified_split(ex, ratios, seed)
    assert set(sa.assignment) == {e.key for e in ex}
    label = {e.key: e.label.as_int for e in ex}
    sizes = Counter(sa.assignment.values())
    for split, r in zip(("train", "test", "validation"), ratios):
        assert abs(sizes[split] - n * Fraction(str(r))) < 1
        members = [label[k] for k, s in sa.assignment.items() if s == split]
        for cls, total in ((0, n_res), (1, n_non)):
            assert abs(members.count(cls) - total * Fraction(str(r))) < 1
            if members:
                share = members.count(cls) / len(members)
                assert abs(share - total / n) <= 1 / len(members) + 1e-12


def test_scaling_two_point():
    X = np.zeros((2, 10))
    X[:, 2] = [1, 3]
    stats = fit_scaling(X)
    assert stats.mean["f3_page_count"] == 2 and stats.std["f3_page_count"] == 1
    assert apply_scaling(X[1], stats)[2] == 1.0


def test_scaling_constant_column_centered_only():
    X = np.zeros((3, 10))
    X[:, 1] = 5
    X[:, 0] = [0, 1, 1]
    stats = fit_scaling(X)
    Z = apply_scaling(X, stats)
    assert np.all(Z[:, 1] == 0)
    assert np.array_equal(Z[:, 0], X[:, 0])  # booleans untouched


def test_scaling_identity():
    v = np.arange(10.0)
    assert np.array_equal(apply_scaling(v, ScalingStats.identity()), v)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 200), st.integers(0, 10**6))
def test_standardized_moments(n, seed):
    ex = random_examples(n, 0.7, seed)
    stats = fit_scaling(ex)
    Z = apply_scaling(as_matrix(ex), stats)
    for i in NUMERIC_INDEX:
        col = Z[:, i]
        assert abs(col.mean()) < 1e-9
        if stats.std[list(stats.std)[NUMERIC_INDEX.index(i)]] > 0:
            assert math.isclose(col.std(), 1.0, abs_tol=1e-9)


def test_scaling_roundtrip_dict():
    stats = fit_scaling(random_examples(20, 0.5, 1))
    assert ScalingStats.from_dict(stats.as_dict()) == stats
