"""Turn a time-ordered transcript into the structured information table.

Each utterance with a callsign becomes one row carrying the aircraft states,
the destination runway, and the destination phrase linked to a graph node when
a graph is available.  Missing runways are then filled per callsign from the
most recent clearance (carry-forward), matching how controllers reference an
already-assigned runway implicitly.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import MalformedFileError
from .evaluation import merge_override
from .rules import EntityLabel, EntitySpan, RuleSet, match_rules, normalize_callsign

_RUNWAY_RE = re.compile(
    r"^\s*(?:runway\s+)?(\d{1,2})\s*(left|right|center|[lrc])?\s*$", re.IGNORECASE
)


@dataclass(frozen=True)
class Utterance:
    time: str
    text: str
    speaker: str | None = None

    @property
    def time_s(self) -> float:
        return parse_time(self.time)


@dataclass(frozen=True)
class InfoRow:
    time: str
    time_s: float
    callsign: str  # surface form, as spoken
    callsign_norm: str  # canonical (telephony designator resolved)
    ac_state: list[str] = field(default_factory=list)
    dest_runway: str | None = None
    destination_raw: str | None = None
    destination_node: str | None = None
    destination_is_runway: bool = False
    remarks: list[str] = field(default_factory=list)

    @property
    def destination_display(self) -> str:
        """DESTINATION cell: runway phrases show the linked entry node, other
        phrases show 'raw(node)' when linked and the raw phrase otherwise."""
        if self.destination_raw is None:
            return ""
        if self.destination_is_runway:
            return self.destination_node or self.destination_raw
        if self.destination_node:
            return f"{self.destination_raw}({self.destination_node})"
        return self.destination_raw

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "time_s": self.time_s,
            "callsign": self.callsign,
            "callsign_norm": self.callsign_norm,
            "ac_state": list(self.ac_state),
            "dest_runway": self.dest_runway,
            "destination_raw": self.destination_raw,
            "destination_node": self.destination_node,
            "destination": self.destination_display,
            "remarks": list(self.remarks),
        }


@dataclass(frozen=True)
class BuildResult:
    rows: list[InfoRow]
    skipped: list[dict]


def parse_time(value: str) -> float:
    """Seconds from transcript epoch for 'HH:MM:SS' or 'M:SS' timestamps."""
    parts = value.strip().split(":")
    try:
        if len(parts) == 3:
            h, m, s = (float(p) for p in parts)
        elif len(parts) == 2:
            h, m, s = 0.0, float(parts[0]), float(parts[1])
        else:
            raise ValueError(f"expected HH:MM:SS or M:SS, got {value!r}")
    except ValueError as exc:
        raise MalformedFileError(f"bad timestamp {value!r}: {exc}") from exc
    return h * 3600.0 + m * 60.0 + s


def classify_dest_runway(destination_text: str | None) -> str | None:
    """Runway id ('34R') when the phrase is runway phraseology, else None."""
    if not destination_text:
        return None
    m = _RUNWAY_RE.match(destination_text)
    if not m:
        return None
    runway = m.group(1).zfill(2)
    side = m.group(2)
    if side:
        runway += side[0].upper()
    return runway


def build_info_table(transcript: list[Utterance], rules: RuleSet,
                     external_predictions: list[list[EntitySpan]] | None = None,
                     graph=None) -> BuildResult:
    """One InfoRow per utterance that names a callsign.

    Spans come from the rule matcher, overridden onto external predictions
    when given.  Utterances without any callsign are skipped and reported.
    """
    if external_predictions is not None and len(external_predictions) != len(transcript):
        raise MalformedFileError(
            f"{len(external_predictions)} prediction lists for {len(transcript)} utterances"
        )
    times = [u.time_s for u in transcript]
    if any(t1 > t2 for t1, t2 in zip(times, times[1:])):
        raise MalformedFileError("transcript timestamps must be non-decreasing")

    rows: list[InfoRow] = []
    skipped: list[dict] = []
    for i, utt in enumerate(transcript):
        spans = match_rules(rules, utt.text)
        if external_predictions is not None:
            spans = merge_override(external_predictions[i], spans)
        callsigns = [s for s in spans if s.label is EntityLabel.CALLSIGN]
        if not callsigns:
            skipped.append({"index": i, "time": utt.time, "reason": "no callsign"})
            continue
        lead = callsigns[0]

        states: list[str] = []
        for s in spans:
            if s.label is EntityLabel.ACSTATE and s.surface.lower() not in [x.lower() for x in states]:
                states.append(s.surface)

        destinations = [s for s in spans if s.label is EntityLabel.DESTINATION]
        runway_spans = [s for s in destinations if classify_dest_runway(s.surface)]
        other_spans = [s for s in destinations if not classify_dest_runway(s.surface)]
        dest_runway = classify_dest_runway(runway_spans[0].surface) if runway_spans else None
        if other_spans:
            dest_raw, is_runway = other_spans[0].surface, False
        elif runway_spans:
            dest_raw, is_runway = runway_spans[0].surface, True
        else:
            dest_raw, is_runway = None, False

        node = None
        if dest_raw is not None and graph is not None:
            from .airport import resolve_destination

            node = resolve_destination(graph, dest_raw)

        rows.append(InfoRow(
            time=utt.time,
            time_s=utt.time_s,
            callsign=lead.surface,
            callsign_norm=normalize_callsign(lead, rules),
            ac_state=states,
            dest_runway=dest_runway,
            destination_raw=dest_raw,
            destination_node=node,
            destination_is_runway=is_runway,
            remarks=[s.surface for s in callsigns[1:]],
        ))
    return BuildResult(rows=rows, skipped=skipped)


def carry_forward(table: list[InfoRow]) -> list[InfoRow]:
    """Fill missing dest_runway per callsign from its most recent prior row."""
    last: dict[str, str] = {}
    out: list[InfoRow] = []
    for row in table:
        if row.dest_runway is None and row.callsign_norm in last:
            row = replace(row, dest_runway=last[row.callsign_norm])
        if row.dest_runway is not None:
            last[row.callsign_norm] = row.dest_runway
        out.append(row)
    return out


def read_transcript_jsonl(path: str | Path) -> list[Utterance]:
    """Read a transcript: one {time, speaker?, text} JSON object per line."""
    utterances = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MalformedFileError(f"cannot read transcript {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
            utterances.append(Utterance(time=str(entry["time"]), text=str(entry["text"]),
                                        speaker=entry.get("speaker")))
        except (json.JSONDecodeError, KeyError) as exc:
            raise MalformedFileError(f"{path}:{lineno}: bad transcript line: {exc}") from exc
    return utterances


def write_table_csv(rows: list[InfoRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["TIME", "CALLSIGN", "ACSTATE", "DEST_RUNWAY", "DESTINATION", "DEST_NODE"])
        for row in rows:
            writer.writerow([
                row.time,
                row.callsign,
                ",".join(row.ac_state),
                row.dest_runway or "",
                row.destination_display,
                row.destination_node or "",
            ])


def write_table_json(rows: list[InfoRow], path: str | Path) -> None:
    payload = [row.to_dict() for row in rows]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
