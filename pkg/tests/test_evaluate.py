import pytest
from hypothesis import given
from hypothesis import strategies as st

from doctypeclf.errors import KeyMismatch
from doctypeclf.evaluate import (ClassMetrics, ConfusionMatrix, class_metrics, confusion, corpus_report,
                                 evaluate, render_table, weighted_metrics)
from doctypeclf.featurize import IssueOverride
from doctypeclf.records import Label, Prediction

R, N = Label.RESEARCH, Label.NON_RESEARCH


def preds_truth(pairs):
    preds = [Prediction(f"k{i}", p, 1.0 if p is N else 0.0) for i, (t, p) in enumerate(pairs)]
    truth = [(f"k{i}", t) for i, (t, p) in enumerate(pairs)]
    return preds, truth


def test_confusion_counts():
    pairs = [(R, R)] * 8 + [(R, N)] * 2 + [(N, R)] * 1 + [(N, N)] * 4
    preds, truth = preds_truth(pairs)
    assert confusion(preds, truth).as_tuple() == (8, 2, 1, 4)


def test_confusion_all_correct():
    preds, truth = preds_truth([(R, R)] * 3 + [(N, N)] * 2)
    cm = confusion(preds, truth)
    assert cm.rn == cm.nr == 0 and cm.total == 5


def test_confusion_key_mismatch():
    preds, _ = preds_truth([(R, R)])
    with pytest.raises(KeyMismatch):
        confusion(preds, [("other", R)])


def test_class_metrics_formula():
    m = class_metrics(ConfusionMatrix(rr=8, rn=1, nr=2, nn=5), R)
    assert m.precision == pytest.approx(0.8)
    assert m.recall == pytest.approx(8 / 9)
    assert m.f1 == pytest.approx(2 * 0.8 * (8 / 9) / (0.8 + 8 / 9))
    assert m.f1 == pytest.approx(0.8421, abs=1e-4)
    assert m.support == 9


def test_zero_division_flagged():
    m = class_metrics(ConfusionMatrix(rr=5, rn=0, nr=0, nn=0), N)
    assert (m.precision, m.recall, m.f1, m.zero_division) == (0.0, 0.0, 0.0, True)


def test_baseline_closed_form():
    prevalence = 0.9258
    f1 = 2 * prevalence * 0.5 / (prevalence + 0.5)
    assert f1 == pytest.approx(0.6494, abs=1e-4)
    assert abs(f1 - 0.6491) < 0.001


def test_weighted_table_values_knn():
    per = {R: ClassMetrics(0.9699, 0.9737, 0.9718, 9258), N: ClassMetrics(0.6546, 0.6228, 0.6383, 742)}
    p, r, f = weighted_metrics(per)
    assert p == pytest.approx(0.9465, abs=1e-4) and abs(p - 0.9470) <= 0.002
    assert f == pytest.approx(0.9471, abs=1e-4) and abs(f - 0.9475) <= 0.002


@given(st.floats(0, 1), st.integers(1, 10**6), st.integers(1, 10**6))
def test_weighted_fixed_point(m, a, b):
    per = {R: ClassMetrics(m, m, m, a), N: ClassMetrics(m, m, m, b)}
    assert weighted_metrics(per) == pytest.approx((m, m, m))


@given(st.lists(st.floats(0, 1), min_size=6, max_size=6), st.integers(1, 1000), st.integers(1, 1000))
def test_weighted_is_convex(v, a, b):
    per = {R: ClassMetrics(v[0], v[1], v[2], a), N: ClassMetrics(v[3], v[4], v[5], b)}
    for i, w in enumerate(weighted_metrics(per)):
        lo, hi = min(v[i], v[i + 3]), max(v[i], v[i + 3])
        assert lo - 1e-12 <= w <= hi + 1e-12


def tally_oracle(pairs):
    """Independent recount with plain loops and per-class formulas."""
    out = {}
    n = len(pairs)
    for cls in (R, N):
        tp = sum(1 for t, p in pairs if t == cls and p == cls)
        pred = sum(1 for _, p in pairs if p == cls)
        true = sum(1 for t, _ in pairs if t == cls)
        prec = tp / pred if pred else 0.0
        rec = tp / true if true else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        out[cls] = (prec, rec, f1, true)
    weighted = tuple(sum(out[c][i] * out[c][3] / n for c in (R, N)) for i in range(3))
    return out, weighted


@given(st.lists(st.tuples(st.sampled_from([R, N]), st.sampled_from([R, N])), min_size=1, max_size=1000))
def test_metrics_match_recount(pairs):
    preds, truth = preds_truth(pairs)
    rep = evaluate(preds, truth)
    per, weighted = tally_oracle(pairs)
    for cls in (R, N):
        m = rep.per_class[cls]
        assert (m.precision, m.recall, m.f1, m.support) == pytest.approx(per[cls])
    assert (rep.weighted["precision"], rep.weighted["recall"], rep.weighted["f1"]) == pytest.approx(weighted)


def _corpus(n, n_nr, triggers=()):
    preds = [Prediction(f"k{i:03d}", N if i < n_nr else R, 0.9 if i < n_nr else 0.1) for i in range(n)]
    ov = {p.key: IssueOverride(True, "sup") if i in triggers else IssueOverride() for i, p in enumerate(preds)}
    return preds, ov


def test_corpus_share():
    preds, ov = _corpus(100, 10)
    rep = corpus_report(preds, ov)
    assert rep.non_research_share == 0.10 and rep.override_triggered == 0


def test_override_moves_research_to_non_research():
    preds, ov = _corpus(3, 0, triggers={1})
    rep = corpus_report(preds, ov)
    assert rep.non_research == 1 and rep.non_research_model == 0


def test_group_tallies_sum_to_total():
    preds, ov = _corpus(50, 12, triggers={3, 30})
    groups = {p.key: 2014 + i % 10 for i, p in enumerate(preds)}
    rep = corpus_report(preds, ov, groups, "year")
    assert sum(g["total"] for g in rep.groups.values()) == rep.total == 50
    assert sum(g["non_research"] for g in rep.groups.values()) == rep.non_research
    assert rep.as_dict()["groups"]["2014"]["total"] == 5


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=200), st.randoms())
def test_corpus_monotone_and_permutation_invariant(flags, rnd):
    preds = [Prediction(f"k{i}", N if nr else R, 0.7 if nr else 0.2) for i, (nr, _) in enumerate(flags)]
    ov = {f"k{i}": IssueOverride(True, "meet") if t else IssueOverride() for i, (_, t) in enumerate(flags)}
    rep = corpus_report(preds, ov)
    assert rep.non_research >= rep.non_research_model
    shuffled = preds[:]
    rnd.shuffle(shuffled)
    assert corpus_report(shuffled, ov).as_dict() == rep.as_dict()


def test_corpus_key_mismatch():
    preds, ov = _corpus(3, 1)
    ov.pop(preds[0].key)
    with pytest.raises(KeyMismatch):
        corpus_report(preds, ov)


def test_render_table():
    preds, truth = preds_truth([(R, R), (N, N), (R, N)])
    text = render_table([evaluate(preds, truth, "test", "knn"), evaluate(preds, truth, "validation", "knn")])
    assert "knn" in text and "non-research" in text and "validation" in text
