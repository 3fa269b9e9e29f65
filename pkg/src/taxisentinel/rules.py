"""Deterministic FAA-phraseology matcher for ATC transcript entities.

Rules come from a JSON file and compile into regular expressions; matching is
case-insensitive and whitespace-insensitive but spans always refer to exact
character offsets of the original utterance.  Conflicts between candidate
spans resolve by longest span, then higher priority, then lower rule index,
then leftmost position, which makes the matcher a pure function of
(ruleset, text).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib.resources import files
from pathlib import Path

from .errors import (
    BadPatternError,
    DuplicateIdError,
    MalformedFileError,
    WrongLabelError,
)

DEFAULT_RULES = "default_rules.json"
DEFAULT_TABLES = "default_tables.json"


class EntityLabel(Enum):
    CALLSIGN = "CALLSIGN"
    ACSTATE = "ACSTATE"
    DESTINATION = "DESTINATION"


class RuleKind(Enum):
    TOKEN_SEQUENCE = "TOKEN_SEQUENCE"
    REGULAR_EXPRESSION = "REGULAR_EXPRESSION"


class SpanSource(Enum):
    RULE = "RULE"
    EXTERNAL = "EXTERNAL"


@dataclass(frozen=True)
class EntitySpan:
    start: int
    end: int
    label: EntityLabel
    surface: str
    source: SpanSource = SpanSource.RULE
    rule_id: str | None = None
    normalized: str | None = None

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad span offsets [{self.start}, {self.end})")
        if (self.rule_id is not None) != (self.source is SpanSource.RULE):
            raise ValueError("rule_id must be present exactly when source is RULE")

    def overlaps(self, other: "EntitySpan") -> bool:
        return self.start < other.end and other.start < self.end

    def key(self) -> tuple[int, int, str]:
        return (self.start, self.end, self.label.value)


@dataclass(frozen=True)
class RulePattern:
    id: str
    label: EntityLabel
    kind: RuleKind
    body: str
    priority: int
    regex: re.Pattern = field(repr=False, compare=False, default=None)

    @staticmethod
    def compile(id: str, label: EntityLabel, kind: RuleKind, body: str, priority: int) -> "RulePattern":
        if priority < 0:
            raise BadPatternError(id, f"rule {id!r}: priority must be non-negative")
        if kind is RuleKind.TOKEN_SEQUENCE:
            tokens = body.split()
            if not tokens:
                raise BadPatternError(id, f"rule {id!r}: empty token sequence")
            pattern = r"\b" + r"\s+".join(re.escape(t) for t in tokens) + r"\b"
        else:
            pattern = body
        try:
            regex = re.compile(pattern, re.IGNORECASE)
        except re.error as exc:
            raise BadPatternError(id, f"rule {id!r}: {exc}") from exc
        return RulePattern(id=id, label=label, kind=kind, body=body, priority=priority, regex=regex)


@dataclass(frozen=True)
class RuleSet:
    patterns: tuple[RulePattern, ...]
    telephony: dict[str, str]  # spoken airline designator -> ICAO code
    phonetic: dict[str, str]  # NATO word -> letter
    numbers: dict[str, str]  # number word -> digit

    def label_counts(self) -> dict[str, int]:
        counts = {label.value: 0 for label in EntityLabel}
        for p in self.patterns:
            counts[p.label.value] += 1
        return counts


def _bundled(name: str) -> Path:
    return Path(str(files("taxisentinel").joinpath("data", name)))


def compile_ruleset(rules_file: str | Path | None = None,
                    tables_file: str | Path | None = None) -> RuleSet:
    """Compile a rules JSON file (and lookup tables) into an immutable RuleSet.

    Both files default to the bundled FAA-phraseology starter set covering the
    Haneda and KATL case-study transcripts.
    """
    rules_path = Path(rules_file) if rules_file is not None else _bundled(DEFAULT_RULES)
    tables_path = Path(tables_file) if tables_file is not None else _bundled(DEFAULT_TABLES)

    try:
        raw = json.loads(rules_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFileError(f"cannot read rules file {rules_path}: {exc}") from exc
    if not isinstance(raw, list):
        raise MalformedFileError("rules file must be a JSON array of rule objects")

    patterns: list[RulePattern] = []
    seen: set[str] = set()
    for entry in raw:
        try:
            rid = str(entry["id"])
            label = EntityLabel[str(entry["label"]).upper()]
            kind = RuleKind[str(entry["kind"]).upper()]
            body = str(entry["body"])
            priority = int(entry.get("priority", 0))
        except (KeyError, TypeError) as exc:
            raise MalformedFileError(f"bad rule entry {entry!r}: {exc}") from exc
        if rid in seen:
            raise DuplicateIdError(rid)
        seen.add(rid)
        patterns.append(RulePattern.compile(rid, label, kind, body, priority))

    try:
        tables = json.loads(tables_path.read_text(encoding="utf-8"))
        telephony = {str(k).lower(): str(v) for k, v in tables["telephony"].items()}
        phonetic = {str(k).lower(): str(v) for k, v in tables["phonetic"].items()}
        numbers = {str(k).lower(): str(v) for k, v in tables["numbers"].items()}
    except (OSError, json.JSONDecodeError, KeyError, AttributeError) as exc:
        raise MalformedFileError(f"cannot read tables file {tables_path}: {exc}") from exc

    return RuleSet(patterns=tuple(patterns), telephony=telephony,
                   phonetic=phonetic, numbers=numbers)


def match_rules(rules: RuleSet, text: str) -> list[EntitySpan]:
    """Extract non-overlapping entity spans from an utterance."""
    if not text:
        return []
    norm, offsets = _normalize_whitespace(text)
    candidates: list[tuple[int, int, RulePattern]] = []
    for index, pattern in enumerate(rules.patterns):
        for m in pattern.regex.finditer(norm):
            if m.start() == m.end():
                continue
            start = offsets[m.start()]
            end = offsets[m.end() - 1] + 1
            candidates.append((start, end, pattern))

    # longest span, then higher priority, then lower rule index, then leftmost
    rule_index = {p.id: i for i, p in enumerate(rules.patterns)}
    candidates.sort(key=lambda c: (-(c[1] - c[0]), -c[2].priority, rule_index[c[2].id], c[0]))
    chosen: list[tuple[int, int, RulePattern]] = []
    for start, end, pattern in candidates:
        if all(end <= s or e <= start for s, e, _ in chosen):
            chosen.append((start, end, pattern))
    chosen.sort(key=lambda c: c[0])
    return [
        EntitySpan(start=s, end=e, label=p.label, surface=text[s:e],
                   source=SpanSource.RULE, rule_id=p.id)
        for s, e, p in chosen
    ]


def normalize_callsign(span: EntitySpan, rules: RuleSet) -> str:
    """Canonical callsign: telephony designator -> ICAO code, number words ->
    digits, whitespace removed, uppercased."""
    if span.label is not EntityLabel.CALLSIGN:
        raise WrongLabelError(f"expected a CALLSIGN span, got {span.label.value}")
    text = " ".join(span.surface.lower().split())
    prefix = ""
    for designator in sorted(rules.telephony, key=len, reverse=True):
        if text == designator or text.startswith(designator + " "):
            prefix = rules.telephony[designator]
            text = text[len(designator):].strip()
            break
    parts = [rules.numbers.get(tok, tok) for tok in text.split()]
    return (prefix + "".join(parts)).upper()


def _normalize_whitespace(text: str) -> tuple[str, list[int]]:
    """Collapse whitespace runs to single spaces, keeping an offset map back
    into the original text."""
    chars: list[str] = []
    offsets: list[int] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            j = i
            while j < n and text[j].isspace():
                j += 1
            if chars and j < n:  # interior run only
                chars.append(" ")
                offsets.append(i)
            i = j
        else:
            chars.append(text[i])
            offsets.append(i)
            i += 1
    return "".join(chars), offsets
