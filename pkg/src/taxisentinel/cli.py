"""Command-line entry point wiring all modules behind documented subcommands.

Exit codes: 0 success, 1 input/validation error, 2 computation error,
3 internal invariant violation.  Every failure also emits one machine-readable
JSON object on stderr.  All randomness comes from explicit seeds in the
inputs, so any command run twice produces byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__, data_path
from .airport import load_graph, shortest_taxi_plan
from .errors import (
    ComputationError,
    InputError,
    MalformedFileError,
    TaxiSentinelError,
    UnresolvedDestinationError,
)
from .evaluation import load_annotations, load_predictions, merge_override, score
from .montecarlo import load_scenario, replay, write_frames_csv, write_frames_jsonl
from .risk import risk_map
from .rules import compile_ruleset, match_rules
from .speedfit import (
    LognormalHypothesis,
    anova_f,
    fit_link_reports,
    fit_lognormal,
    kruskal_wallis,
    ks_test,
    link_speed_extract,
    read_track_csv,
)
from .transcripts import (
    build_info_table,
    carry_forward,
    read_transcript_jsonl,
    write_table_csv,
    write_table_json,
)

DEFAULT_COLLISION_RADIUS_M = 32.5  # averaged A350/CRJ-900 wingspan, halved


def max_threads() -> int:
    """Parallelism cap from TAXI_SENTINEL_THREADS (default: machine cores).

    Computations are evaluated deterministically regardless of the cap; the
    variable exists so deployments can bound future worker pools.
    """
    raw = os.environ.get("TAXI_SENTINEL_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
    except ValueError:
        raise InputError(f"TAXI_SENTINEL_THREADS must be a positive integer, got {raw!r}")
    return value


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        max_threads()
        return args.handler(args)
    except InputError as exc:
        _emit_error(exc.code, exc.message)
        return 1
    except ComputationError as exc:
        _emit_error(exc.code, exc.message)
        return 2
    except TaxiSentinelError as exc:  # unexpected category
        _emit_error(exc.code, exc.message)
        return 3
    except Exception as exc:  # invariant violation
        _emit_error("INTERNAL", f"{type(exc).__name__}: {exc}")
        return 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taxi-sentinel",
        description="ATC transcript extraction and airport surface collision risk",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="transcript -> structured info table")
    p.add_argument("--rules", help="rules JSON (default: bundled starter set)")
    p.add_argument("--tables", help="telephony/phonetic/number tables JSON")
    p.add_argument("--transcript", required=True, help="JSON Lines transcript")
    p.add_argument("--external-preds", help="external model predictions JSON")
    p.add_argument("--graph", help="airport graph for destination linking")
    p.add_argument("--out", required=True, help="output prefix (.csv/.json/.skips.json)")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("eval", help="score predictions against gold annotations")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--rules", help="apply rule override before scoring")
    p.add_argument("--tables")
    p.add_argument("--out", help="write the metrics JSON here as well")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("plan", help="shortest taxi plan between nodes")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="frm", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--via", help="comma-separated intermediate nodes")
    p.add_argument("--start-time", type=float, default=0.0)
    p.add_argument("--callsign", default="")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_plan)

    p = sub.add_parser("risk", help="collision risk map over shared plan nodes")
    p.add_argument("--scenario", help="scenario JSON with explicit plans")
    p.add_argument("--graph", help="graph (required with --table)")
    p.add_argument("--table", help="info table JSON from `extract`")
    p.add_argument("--aircraft", action="append", default=[],
                   help="CALLSIGN:START_NODE[:START_TIME], twice (table mode)")
    p.add_argument("--r-c", dest="r_c", type=float,
                   help=f"collision radius in meters (default {DEFAULT_COLLISION_RADIUS_M})")
    p.add_argument("--out", required=True, help="output prefix (.json/.csv[/.geojson])")
    p.set_defaults(handler=cmd_risk)

    p = sub.add_parser("simulate", help="replay one Monte Carlo sample as frames")
    p.add_argument("--scenario", required=True)
    p.add_argument("--step", type=float, default=1.0, help="frame interval, seconds")
    p.add_argument("--sample", type=int, default=0, help="sample index to replay")
    p.add_argument("--out", required=True, help="output prefix (.jsonl/.csv)")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("fit", help="fit link speed distributions from surface tracks")
    p.add_argument("--tracks", required=True, help="CSV time,callsign,x,y[,weight_class]")
    p.add_argument("--graph", required=True)
    p.add_argument("--cutoff", type=float, default=0.5, help="stationary cutoff, m/s")
    p.add_argument("--out", help="fit report JSON")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("stats", help="statistical tests on speed samples")
    p.add_argument("--samples", required=True, help="JSON list of speed samples")
    p.add_argument("--group-by", default="weight_class", choices=["weight_class"])
    p.add_argument("--test", required=True, choices=["anova", "kw", "ks"])
    p.add_argument("--link", help="restrict to one link id")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("rules-check", help="compile a ruleset and report its shape")
    p.add_argument("--rules")
    p.add_argument("--tables")
    p.set_defaults(handler=cmd_rules_check)

    return parser


def cmd_extract(args) -> int:
    rules = compile_ruleset(args.rules, args.tables)
    transcript = read_transcript_jsonl(args.transcript)
    external = load_predictions(args.external_preds) if args.external_preds else None
    graph = load_graph(args.graph) if args.graph else None
    result = build_info_table(transcript, rules, external_predictions=external, graph=graph)
    rows = carry_forward(result.rows)
    out = Path(args.out)
    write_table_csv(rows, out.with_suffix(".csv"))
    write_table_json(rows, out.with_suffix(".json"))
    skip_report = {"total": len(transcript), "emitted": len(rows), "skipped": result.skipped}
    out.with_suffix(".skips.json").write_text(json.dumps(skip_report, indent=2) + "\n",
                                              encoding="utf-8")
    print(f"{len(rows)} rows written to {out.with_suffix('.csv')} ({len(result.skipped)} utterances skipped)")
    return 0


def cmd_eval(args) -> int:
    gold = load_annotations(args.gold)
    predictions = load_predictions(args.pred)
    if args.rules or args.tables:
        rules = compile_ruleset(args.rules, args.tables)
        merged = [
            merge_override(preds, match_rules(rules, utt.text))
            for utt, preds in zip(gold, predictions)
        ]
        payload = {
            "external": score(gold, predictions).to_dict(),
            "merged": score(gold, merged).to_dict(),
        }
    else:
        payload = score(gold, predictions).to_dict()
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_plan(args) -> int:
    graph = load_graph(args.graph)
    via = [v for v in (args.via or "").split(",") if v] or None
    plan = shortest_taxi_plan(graph, args.frm, args.to, via=via,
                              start_time=args.start_time, callsign=args.callsign)
    payload = {
        "callsign": plan.callsign,
        "nodes": plan.nodes,
        "links": [{"a": lk.a, "b": lk.b, "length": lk.length} for lk in plan.links],
        "start_time": plan.start_time,
        "total_length": plan.total_length,
    }
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_risk(args) -> int:
    if args.scenario:
        graph = load_graph(args.graph) if args.graph else None
        scenario = load_scenario(args.scenario, graph=graph)
        graph = scenario.graph
        ac1, ac2 = scenario.aircraft[0], scenario.aircraft[1]
        plans = (ac1.plan, ac2.plan)
        offsets = (ac1.start_time, ac2.start_time)
        r_c = args.r_c if args.r_c is not None else scenario.r_c
    elif args.table:
        if not args.graph:
            raise InputError("--table mode needs --graph")
        if len(args.aircraft) != 2:
            raise InputError("--table mode needs exactly two --aircraft CALLSIGN:START[:TIME]")
        graph = load_graph(args.graph)
        table = _read_table_json(args.table)
        plans = []
        offsets = []
        for spec in args.aircraft:
            callsign, start_node, start_time = _parse_aircraft_spec(spec)
            dest = _table_destination(table, callsign)
            plans.append(shortest_taxi_plan(graph, start_node, dest,
                                            start_time=start_time, callsign=callsign))
            offsets.append(start_time)
        r_c = args.r_c if args.r_c is not None else DEFAULT_COLLISION_RADIUS_M
    else:
        raise InputError("risk needs --scenario or --table")

    scores = risk_map(plans[0], plans[1], graph, r_c, offsets[0], offsets[1])
    out = Path(args.out)
    payload = [
        {
            "node": s.node,
            "probability": s.probability,
            "overlap_density": s.overlap_density,
            "inv_speed_expectation": s.inv_speed_expectation,
            "clamped": s.clamped,
        }
        for s in scores
    ]
    out.with_suffix(".json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    with open(out.with_suffix(".csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "probability", "overlap_density", "inv_speed_expectation", "clamped"])
        for s in scores:
            writer.writerow([s.node, repr(s.probability), repr(s.overlap_density),
                             repr(s.inv_speed_expectation), s.clamped])
    if graph.geodetic:
        _write_geojson(graph, payload, out.with_suffix(".geojson"))
    if not scores:
        print("empty risk map: plans share no nodes", file=sys.stderr)
        print("no overlap")
        return 0
    best = max(scores, key=lambda s: s.probability)
    print(f"argmax {best.node} probability {best.probability:.6g}")
    return 0


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    frames = replay(scenario, sample_index=args.sample, time_step=args.step)
    out = Path(args.out)
    write_frames_jsonl(frames, out.with_suffix(".jsonl"))
    write_frames_csv(frames, out.with_suffix(".csv"))
    print(f"{len(frames)} frames written to {out.with_suffix('.jsonl')}")
    return 0


def cmd_fit(args) -> int:
    graph = load_graph(args.graph)
    track = read_track_csv(args.tracks, graph=graph)
    samples = link_speed_extract(track, graph, stationary_cutoff=args.cutoff)
    reports, skipped = fit_link_reports(samples)
    payload = {
        "fits": [
            {
                "link": r.link,
                "n": r.n,
                "mu_log": r.params.mu_log,
                "sigma_log": r.params.sigma_log,
                "ks_statistic": r.ks_statistic,
                "ks_p_value": r.ks_p_value,
            }
            for r in reports
        ],
        "skipped": skipped,
        "samples": len(samples),
    }
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_stats(args) -> int:
    entries = _read_samples_json(args.samples)
    if args.link:
        entries = [e for e in entries if e["link"] == args.link]
    groups: dict[str, list[float]] = {}
    for e in entries:
        key = e.get("weight_class") or "UNKNOWN"
        groups.setdefault(key, []).append(float(e["speed"]))
    names = sorted(groups)
    if args.test == "anova":
        f, p = anova_f([groups[k] for k in names])
        payload = {"test": "anova", "groups": names, "F": f, "p_value": p}
    elif args.test == "kw":
        h, p = kruskal_wallis([groups[k] for k in names])
        payload = {"test": "kruskal-wallis", "groups": names, "H": h, "p_value": p}
    else:
        results = []
        for key in names:
            speeds = groups[key]
            params = fit_lognormal(speeds)
            d, p = ks_test(speeds, LognormalHypothesis(params))
            results.append({"group": key, "n": len(speeds), "mu_log": params.mu_log,
                            "sigma_log": params.sigma_log, "D": d, "p_value": p})
        payload = {"test": "ks-lognormal", "results": results}
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_rules_check(args) -> int:
    rules = compile_ruleset(args.rules, args.tables)
    payload = {
        "rules": len(rules.patterns),
        "by_label": rules.label_counts(),
        "telephony_entries": len(rules.telephony),
        "phonetic_entries": len(rules.phonetic),
        "number_entries": len(rules.numbers),
    }
    print(json.dumps(payload, indent=2))
    return 0


def _parse_aircraft_spec(spec: str) -> tuple[str, str, float]:
    parts = spec.split(":")
    if len(parts) == 2:
        return parts[0], parts[1], 0.0
    if len(parts) == 3:
        try:
            return parts[0], parts[1], float(parts[2])
        except ValueError as exc:
            raise InputError(f"bad start time in --aircraft {spec!r}") from exc
    raise InputError(f"--aircraft must be CALLSIGN:START_NODE[:START_TIME], got {spec!r}")


def _read_table_json(path: str) -> list[dict]:
    try:
        rows = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFileError(f"cannot read info table {path}: {exc}") from exc
    if not isinstance(rows, list):
        raise MalformedFileError("info table JSON must be a list of rows")
    return rows


def _table_destination(table: list[dict], callsign: str) -> str:
    wanted = callsign.upper()
    dest = None
    for row in table:
        if row.get("callsign") == callsign or row.get("callsign_norm") == wanted:
            if row.get("destination_node"):
                dest = row["destination_node"]
    if dest is None:
        raise UnresolvedDestinationError(
            f"no linked destination for {callsign!r} in the info table"
        )
    return dest


def _read_samples_json(path: str) -> list[dict]:
    try:
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFileError(f"cannot read samples file {path}: {exc}") from exc
    if not isinstance(entries, list):
        raise MalformedFileError("samples file must be a JSON list")
    return entries


def _write_geojson(graph, payload: list[dict], path: Path) -> None:
    features = []
    for entry in payload:
        node = graph.nodes[entry["node"]]
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [node.lon, node.lat]},
            "properties": entry,
        })
    path.write_text(json.dumps({"type": "FeatureCollection", "features": features}, indent=2) + "\n",
                    encoding="utf-8")


def _emit_error(code: str, detail: str) -> None:
    print(json.dumps({"error": code, "detail": detail}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
