"""Seeded sampling oracle for route times, collision events, and replays.

Speeds are drawn once per (aircraft, link) from that link's log-normal, with
RNG substreams keyed by (seed, aircraft index, link index) so any subset of
draws is reproducible independently of evaluation order.  The collision
oracle simulates the exact event definition rather than the analytic
approximation, which is what makes it usable as an independent check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .airport import AirportGraph, TaxiPlan, load_graph, plan_from_nodes
from .errors import EmptyPlanError, MalformedFileError, SpotNotSharedError


@dataclass(frozen=True)
class AircraftSpec:
    callsign: str
    plan: TaxiPlan
    start_time: float


@dataclass(frozen=True)
class ScenarioConfig:
    graph: AirportGraph
    aircraft: list[AircraftSpec]
    r_c: float
    rng_seed: int
    sample_count: int

    def __post_init__(self):
        if len(self.aircraft) < 2:
            raise MalformedFileError("a collision scenario needs at least two aircraft")
        if self.r_c <= 0:
            raise MalformedFileError("collision radius must be > 0")
        if self.sample_count < 1:
            raise MalformedFileError("sample count must be >= 1")


@dataclass(frozen=True)
class SnapshotFrame:
    time: float
    positions: dict[str, dict]  # callsign -> {link, fraction, completed, x, y}


def load_scenario(path: str | Path, graph: AirportGraph | None = None) -> ScenarioConfig:
    """Read a scenario JSON; the graph path inside resolves relative to it."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFileError(f"cannot read scenario {path}: {exc}") from exc
    try:
        if graph is None:
            graph_path = Path(raw["graph"])
            if not graph_path.is_absolute():
                graph_path = path.parent / graph_path
            graph = load_graph(graph_path)
        aircraft = [
            AircraftSpec(
                callsign=str(entry["callsign"]),
                plan=plan_from_nodes(graph, [str(n) for n in entry["nodes"]],
                                     callsign=str(entry["callsign"]),
                                     start_time=float(entry["start_time"])),
                start_time=float(entry["start_time"]),
            )
            for entry in raw["aircraft"]
        ]
        return ScenarioConfig(graph=graph, aircraft=aircraft, r_c=float(raw["r_c"]),
                              rng_seed=int(raw["seed"]), sample_count=int(raw["samples"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFileError(f"bad scenario {path}: {exc}") from exc


def _link_speeds(plan: TaxiPlan, link_index: int, n: int, seed: int, aircraft_index: int) -> np.ndarray:
    params = plan.links[link_index].speed_params
    rng = np.random.default_rng(np.random.SeedSequence((seed, aircraft_index, link_index)))
    return rng.lognormal(params.mu_log, params.sigma_log, n)


def sample_route_times(plan: TaxiPlan, graph: AirportGraph, n: int, seed: int,
                       aircraft_index: int = 0) -> np.ndarray:
    """n independent totals of d_i / v_i over the plan's links (seconds)."""
    if not plan.links:
        raise EmptyPlanError("plan has no links to sample")
    if n < 1:
        raise MalformedFileError("sample count must be >= 1")
    total = np.zeros(n)
    for i, link in enumerate(plan.links):
        total += link.length / _link_speeds(plan, i, n, seed, aircraft_index)
    return total


def mc_collision_oracle(scenario: ScenarioConfig, spot: str) -> tuple[float, float]:
    """Estimate P(collision at spot) by direct event simulation.

    Per sample: aircraft 1 fixes the time T1 it reaches the spot; the event
    fires when aircraft 2's along-path distance from the spot at T1 is at most
    r_c (not yet arrived but close, or at most r_c past it).  Returns
    (p_hat, standard_error).
    """
    ac1, ac2 = scenario.aircraft[0], scenario.aircraft[1]
    for ac in (ac1, ac2):
        if spot not in ac.plan.nodes:
            raise SpotNotSharedError(f"spot {spot!r} is not on {ac.callsign}'s plan")
    n = scenario.sample_count
    seed = scenario.rng_seed

    i1 = ac1.plan.nodes.index(spot)
    if i1 == 0:
        t1 = np.full(n, ac1.start_time)
    else:
        t1 = ac1.start_time + np.zeros(n)
        for i in range(i1):
            t1 += ac1.plan.links[i].length / _link_speeds(ac1.plan, i, n, seed, 0)

    pos = _positions_at(ac2, t1, n, seed, aircraft_index=1)
    cum = np.concatenate(([0.0], np.cumsum([lk.length for lk in ac2.plan.links])))
    s_spot = cum[ac2.plan.nodes.index(spot)]
    hits = np.abs(pos - s_spot) <= scenario.r_c
    p_hat = float(hits.mean())
    se = math.sqrt(p_hat * (1.0 - p_hat) / n)
    return p_hat, se


def replay(scenario: ScenarioConfig, sample_index: int = 0, time_step: float = 1.0) -> list[SnapshotFrame]:
    """Frame-by-frame positions for one drawn sample of the scenario.

    Frames run from the earliest start to the latest completion at the given
    step; aircraft hold at their first link before starting and at their final
    node after completing.
    """
    if time_step <= 0:
        raise MalformedFileError("time step must be > 0")
    if sample_index < 0:
        raise MalformedFileError("sample index must be >= 0")
    states = []
    for k, ac in enumerate(scenario.aircraft):
        speeds = [
            _link_speeds(ac.plan, i, sample_index + 1, scenario.rng_seed, k)[-1]
            for i in range(len(ac.plan.links))
        ]
        arrivals = [ac.start_time]
        for link, v in zip(ac.plan.links, speeds):
            arrivals.append(arrivals[-1] + link.length / v)
        states.append((ac, speeds, arrivals))

    t0 = min(ac.start_time for ac in scenario.aircraft)
    t_end = max(st[2][-1] for st in states)
    n_frames = math.ceil((t_end - t0) / time_step) + 1
    frames = []
    for f in range(n_frames):
        t = t0 + f * time_step
        positions = {}
        for ac, speeds, arrivals in states:
            positions[ac.callsign] = _position_state(scenario.graph, ac.plan, speeds, arrivals, t)
        frames.append(SnapshotFrame(time=t, positions=positions))
    return frames


def _positions_at(ac: AircraftSpec, t: np.ndarray, n: int, seed: int,
                  aircraft_index: int) -> np.ndarray:
    """Along-path positions of one aircraft at per-sample times t."""
    plan = ac.plan
    n_links = len(plan.links)
    if n_links == 0:
        return np.zeros(n)
    speeds = np.empty((n, n_links))
    for i in range(n_links):
        speeds[:, i] = _link_speeds(plan, i, n, seed, aircraft_index)
    arrivals = np.empty((n, n_links + 1))
    arrivals[:, 0] = ac.start_time
    for i, link in enumerate(plan.links):
        arrivals[:, i + 1] = arrivals[:, i] + link.length / speeds[:, i]
    cum = np.concatenate(([0.0], np.cumsum([lk.length for lk in plan.links])))

    idx = (arrivals <= t[:, None]).sum(axis=1) - 1  # last node already reached
    pos = np.zeros(n)
    done = idx >= n_links
    pos[done] = cum[-1]
    moving = (idx >= 0) & ~done
    rows = np.nonzero(moving)[0]
    j = idx[moving]
    pos[moving] = cum[j] + speeds[rows, j] * (t[moving] - arrivals[rows, j])
    return pos


def _position_state(graph: AirportGraph, plan: TaxiPlan, speeds: list[float],
                    arrivals: list[float], t: float) -> dict:
    n_links = len(plan.links)
    if n_links == 0 or t >= arrivals[-1]:
        link = plan.links[-1] if n_links else None
        node = graph.nodes[plan.nodes[-1]]
        return {"link": link.id if link else None, "fraction": 1.0 if link else 0.0,
                "completed": True, "x": node.x, "y": node.y}
    if t <= arrivals[0]:
        node = graph.nodes[plan.nodes[0]]
        return {"link": plan.links[0].id, "fraction": 0.0, "completed": False,
                "x": node.x, "y": node.y}
    j = 0
    while arrivals[j + 1] <= t:
        j += 1
    frac = speeds[j] * (t - arrivals[j]) / plan.links[j].length
    frac = min(max(frac, 0.0), 1.0)
    a = graph.nodes[plan.nodes[j]]
    b = graph.nodes[plan.nodes[j + 1]]
    return {"link": plan.links[j].id, "fraction": frac, "completed": False,
            "x": a.x + frac * (b.x - a.x), "y": a.y + frac * (b.y - a.y)}


def write_frames_jsonl(frames: list[SnapshotFrame], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(json.dumps({"time": frame.time, "positions": frame.positions}) + "\n")


def write_frames_csv(frames: list[SnapshotFrame], path: str | Path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "callsign", "x", "y"])
        for frame in frames:
            for callsign, state in frame.positions.items():
                writer.writerow([frame.time, callsign, state["x"], state["y"]])
