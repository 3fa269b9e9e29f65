from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taxisentinel.errors import LengthMismatchError, OverlappingInputError
from taxisentinel.evaluation import (
    AnnotatedUtterance,
    MetricsReport,
    corpus_stats,
    degrade_gold,
    merge_override,
    score,
)
from taxisentinel.rules import EntityLabel, EntitySpan, SpanSource


def ext(start, end, label, surface="x" * 1):
    return EntitySpan(start, end, EntityLabel[label], "x" * (end - start), SpanSource.EXTERNAL)


def rule(start, end, label):
    return EntitySpan(start, end, EntityLabel[label], "x" * (end - start), SpanSource.RULE, rule_id="r")


def test_merge_empty_external():
    merged = merge_override([], [rule(0, 13, "CALLSIGN")])
    assert [(s.start, s.end, s.label) for s in merged] == [(0, 13, EntityLabel.CALLSIGN)]


def test_merge_total_overlap_rule_wins():
    merged = merge_override([ext(5, 9, "DESTINATION")], [rule(5, 9, "CALLSIGN")])
    assert len(merged) == 1
    assert merged[0].label is EntityLabel.CALLSIGN
    assert merged[0].source is SpanSource.RULE


def test_merge_disjoint_union_sorted():
    merged = merge_override([ext(20, 24, "ACSTATE")], [rule(0, 13, "CALLSIGN")])
    assert [(s.start, s.end) for s in merged] == [(0, 13), (20, 24)]


def test_merge_partial_overlap_drops_external():
    merged = merge_override([ext(3, 8, "ACSTATE")], [rule(5, 9, "CALLSIGN")])
    assert [(s.start, s.end) for s in merged] == [(5, 9)]


def test_merge_rejects_overlapping_input():
    with pytest.raises(OverlappingInputError):
        merge_override([ext(0, 5, "ACSTATE"), ext(3, 8, "ACSTATE")], [])
    with pytest.raises(OverlappingInputError):
        merge_override([], [rule(0, 5, "ACSTATE"), rule(3, 8, "ACSTATE")])


def annotated(text, spans):
    return AnnotatedUtterance(text=text, gold=[
        EntitySpan(s, e, EntityLabel[lb], text[s:e], SpanSource.EXTERNAL) for s, e, lb in spans
    ])


def test_score_identity():
    gold = [annotated("Delta 295 taxi", [(0, 9, "CALLSIGN"), (10, 14, "ACSTATE")])]
    report = score(gold, [list(gold[0].gold)])
    assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)


def test_score_disjoint():
    gold = [annotated("Delta 295 taxi", [(0, 9, "CALLSIGN")])]
    preds = [[ext(10, 14, "ACSTATE")]]
    report = score(gold, preds)
    assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)


def test_score_hand_counts():
    # tp=2, fp=1, fn=2 -> P=2/3, R=1/2, F1=4/7
    gold = [
        annotated("aaaa bbbb cccc", [(0, 4, "CALLSIGN"), (5, 9, "ACSTATE"), (10, 14, "DESTINATION")]),
        annotated("dddd eeee", [(0, 4, "CALLSIGN")]),
    ]
    preds = [
        [ext(0, 4, "CALLSIGN"), ext(5, 9, "DESTINATION")],  # 1 tp, 1 fp (wrong label)
        [ext(0, 4, "CALLSIGN")],  # 1 tp
    ]
    report = score(gold, preds)
    assert (report.tp, report.fp, report.fn) == (2, 1, 2)
    assert report.precision == pytest.approx(2 / 3, abs=1e-12)
    assert report.recall == pytest.approx(0.5, abs=1e-12)
    assert report.f1 == pytest.approx(float(Fraction(4, 7)), abs=1e-12)


def test_score_length_mismatch():
    with pytest.raises(LengthMismatchError):
        score([annotated("x y", [])], [])


def test_score_permutation_invariant():
    gold = [
        annotated("aaaa", [(0, 4, "CALLSIGN")]),
        annotated("bbbb cc", [(0, 4, "ACSTATE"), (5, 7, "DESTINATION")]),
        annotated("dd", []),
    ]
    preds = [[ext(0, 4, "CALLSIGN")], [ext(0, 4, "DESTINATION")], [ext(0, 2, "ACSTATE")]]
    fwd = score(gold, preds)
    rev = score(gold[::-1], preds[::-1])
    assert (fwd.tp, fwd.fp, fwd.fn) == (rev.tp, rev.fp, rev.fn)


def test_corpus_stats_single_utterance():
    gold = [annotated("aaaa bbbb cccc", [(0, 4, "CALLSIGN"), (5, 9, "ACSTATE"), (10, 14, "DESTINATION")])]
    stats = corpus_stats({"train": gold})
    assert stats["train"]["counts"] == {"CALLSIGN": 1, "ACSTATE": 1, "DESTINATION": 1}
    for share in stats["train"]["percentages"].values():
        assert share == pytest.approx(100 / 3, abs=0.01)


def test_corpus_stats_empty_split():
    stats = corpus_stats({"val": []})
    assert stats["val"]["total"] == 0
    assert all(v == 0.0 for v in stats["val"]["percentages"].values())


def test_corpus_stats_two_splits_hand_tally():
    train = [
        annotated("aaaa bbbb", [(0, 4, "CALLSIGN"), (5, 9, "CALLSIGN")]),
        annotated("cccc", [(0, 4, "ACSTATE")]),
    ]
    test = [annotated("dddd", [(0, 4, "DESTINATION")])]
    stats = corpus_stats({"train": train, "test": test})
    assert stats["train"]["counts"] == {"CALLSIGN": 2, "ACSTATE": 1, "DESTINATION": 0}
    assert stats["test"]["counts"] == {"CALLSIGN": 0, "ACSTATE": 0, "DESTINATION": 1}
    assert sum(stats["train"]["percentages"].values()) == pytest.approx(100.0, abs=0.01)


def test_f1_bounds_property():
    reports = [MetricsReport(tp, fp, fn) for tp in range(4) for fp in range(4) for fn in range(4)]
    for r in reports:
        if r.precision + r.recall > 0:
            assert min(r.precision, r.recall) - 1e-12 <= r.f1 <= max(r.precision, r.recall) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(0.0, 0.6), st.floats(0.0, 0.3))
def test_override_recall_dominance(seed, delete_frac, mislabel_frac):
    # rules that exactly reproduce a subset of gold can only help recall
    gold = [
        annotated("aaaa bbbb cccc dddd", [(0, 4, "CALLSIGN"), (5, 9, "ACSTATE"), (10, 14, "DESTINATION")]),
        annotated("eeee ffff", [(0, 4, "CALLSIGN"), (5, 9, "DESTINATION")]),
    ]
    rule_spans = [
        [rule(0, 4, "CALLSIGN"), rule(5, 9, "ACSTATE")],
        [rule(0, 4, "CALLSIGN")],
    ]
    external = degrade_gold(gold, delete_frac, mislabel_frac, seed)
    merged = [merge_override(e, r) for e, r in zip(external, rule_spans)]
    assert score(gold, merged).recall >= score(gold, external).recall - 1e-12
