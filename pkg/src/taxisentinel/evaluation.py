"""Rule-override merging of entity predictions and micro P/R/F1 scoring.

Rule matches are trusted over external model predictions: a merged output
keeps every rule span and only those external spans that touch no rule span.
Scoring is exact-boundary, exact-label micro-averaging over the corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import LengthMismatchError, MalformedFileError, OverlappingInputError
from .rules import EntityLabel, EntitySpan, SpanSource


@dataclass(frozen=True)
class AnnotatedUtterance:
    text: str
    gold: list[EntitySpan]

    def __post_init__(self):
        for span in self.gold:
            if span.end > len(self.text):
                raise ValueError(f"span [{span.start}, {span.end}) exceeds text length {len(self.text)}")
            if span.surface != self.text[span.start:span.end]:
                raise ValueError(f"span surface {span.surface!r} does not match the text slice")
        _require_nonoverlapping(self.gold, "gold")


@dataclass(frozen=True)
class MetricsReport:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def merge_override(external: list[EntitySpan], rule: list[EntitySpan]) -> list[EntitySpan]:
    """Merge external predictions with rule matches; rules win on overlap."""
    _require_nonoverlapping(external, "external")
    _require_nonoverlapping(rule, "rule")
    merged = list(rule)
    for span in external:
        if not any(span.overlaps(r) for r in rule):
            merged.append(span)
    merged.sort(key=lambda s: (s.start, s.end))
    return merged


def score(gold: list[AnnotatedUtterance], predicted: list[list[EntitySpan]]) -> MetricsReport:
    """Micro-averaged exact-match metrics over a corpus.

    A prediction is a true positive iff (start, end, label) all equal a gold
    span of the same utterance.
    """
    if len(gold) != len(predicted):
        raise LengthMismatchError(
            f"{len(gold)} gold utterances but {len(predicted)} prediction lists"
        )
    tp = fp = fn = 0
    for utt, preds in zip(gold, predicted):
        gold_keys = {s.key() for s in utt.gold}
        pred_keys = {s.key() for s in preds}
        tp += len(gold_keys & pred_keys)
        fp += len(pred_keys - gold_keys)
        fn += len(gold_keys - pred_keys)
    return MetricsReport(tp=tp, fp=fp, fn=fn)


def corpus_stats(datasets: dict[str, list[AnnotatedUtterance]]) -> dict:
    """Per-split entity counts and percentage shares by label."""
    out = {}
    for split, utterances in datasets.items():
        counts = {label.value: 0 for label in EntityLabel}
        for utt in utterances:
            for span in utt.gold:
                counts[span.label.value] += 1
        total = sum(counts.values())
        percentages = {
            label: (100.0 * count / total if total else 0.0)
            for label, count in counts.items()
        }
        out[split] = {"counts": counts, "percentages": percentages, "total": total}
    return out


def degrade_gold(gold: list[AnnotatedUtterance], delete_frac: float = 0.3,
                 mislabel_frac: float = 0.1, seed: int = 0) -> list[list[EntitySpan]]:
    """Simulate an imperfect external model from gold annotations.

    Deletes a fraction of gold entities and swaps the label on another
    fraction of the survivors; deterministic for a fixed seed.  Used to build
    the bundled degraded-predictions fixture.
    """
    rng = np.random.default_rng(seed)
    labels = list(EntityLabel)
    out: list[list[EntitySpan]] = []
    for utt in gold:
        preds: list[EntitySpan] = []
        for span in utt.gold:
            u = rng.random()
            if u < delete_frac:
                continue
            label = span.label
            if u < delete_frac + mislabel_frac:
                others = [lb for lb in labels if lb is not label]
                label = others[int(rng.integers(len(others)))]
            preds.append(EntitySpan(start=span.start, end=span.end, label=label,
                                    surface=span.surface, source=SpanSource.EXTERNAL))
        out.append(preds)
    return out


def load_annotations(path: str | Path) -> list[AnnotatedUtterance]:
    """Read a gold/prediction JSON file: [{text, entities: [[start, end, label]]}]."""
    entries = _read_entries(path)
    out = []
    for entry in entries:
        text = entry["text"]
        spans = [
            EntitySpan(start=int(s), end=int(e), label=EntityLabel[str(lb).upper()],
                       surface=text[int(s):int(e)], source=SpanSource.EXTERNAL)
            for s, e, lb in entry.get("entities", [])
        ]
        out.append(AnnotatedUtterance(text=text, gold=spans))
    return out


def load_predictions(path: str | Path) -> list[list[EntitySpan]]:
    return [utt.gold for utt in load_annotations(path)]


def save_annotations(path: str | Path, utterances: list[AnnotatedUtterance]) -> None:
    payload = [
        {"text": u.text, "entities": [[s.start, s.end, s.label.value] for s in u.gold]}
        for u in utterances
    ]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _read_entries(path: str | Path) -> list:
    try:
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFileError(f"cannot read annotations file {path}: {exc}") from exc
    if not isinstance(entries, list):
        raise MalformedFileError("annotations file must be a JSON list")
    for entry in entries:
        if "text" not in entry:
            raise MalformedFileError(f"annotation entry missing 'text': {entry!r}")
    return entries


def _require_nonoverlapping(spans: list[EntitySpan], which: str) -> None:
    ordered = sorted(spans, key=lambda s: (s.start, s.end))
    for a, b in zip(ordered, ordered[1:]):
        if a.overlaps(b):
            raise OverlappingInputError(
                f"{which} spans overlap: [{a.start},{a.end}) and [{b.start},{b.end})"
            )
