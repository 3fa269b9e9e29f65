from __future__ import annotations

import itertools
import json
import math

import numpy as np
import pytest

from taxisentinel.airport import (
    KT_TO_MS,
    NodeKind,
    SpeedClass,
    classify_link_kinds,
    link_destination,
    load_graph,
    plan_from_nodes,
    plan_overlap,
    resolve_destination,
    shortest_taxi_plan,
)
from taxisentinel.errors import (
    DuplicateNodeError,
    EmptyQueryError,
    MalformedFileError,
    NoPathError,
    UnknownNodeError,
)


def write_graph(tmp_path, payload, name="g.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def test_load_length_defaults_to_euclidean(tmp_path):
    path = write_graph(tmp_path, {
        "nodes": [
            {"id": "A", "x": 0, "y": 0, "kind": "TAXIWAY"},
            {"id": "B", "x": 30, "y": 40, "kind": "TAXIWAY"},
        ],
        "links": [{"a": "A", "b": "B"}],
    })
    graph = load_graph(path)
    assert graph.links[0].length == pytest.approx(50.0)


def test_load_unknown_node(tmp_path):
    path = write_graph(tmp_path, {
        "nodes": [{"id": "A", "x": 0, "y": 0, "kind": "TAXIWAY"}],
        "links": [{"a": "A", "b": "MISSING"}],
    })
    with pytest.raises(UnknownNodeError):
        load_graph(path)


def test_load_duplicate_node(tmp_path):
    path = write_graph(tmp_path, {
        "nodes": [
            {"id": "A", "x": 0, "y": 0, "kind": "TAXIWAY"},
            {"id": "A", "x": 1, "y": 1, "kind": "TAXIWAY"},
        ],
        "links": [],
    })
    with pytest.raises(DuplicateNodeError):
        load_graph(path)


def test_load_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2]")
    with pytest.raises(MalformedFileError):
        load_graph(path)


def test_haneda_fixture_kinds(haneda_graph):
    runway_nodes = [n for n in haneda_graph.nodes.values() if n.id.startswith("Rwy_03_")]
    assert len(runway_nodes) == 10
    assert all(n.kind is NodeKind.RUNWAY for n in runway_nodes)


def test_geodetic_projection(tmp_path):
    # ~111 m per 0.001 deg latitude
    path = write_graph(tmp_path, {
        "nodes": [
            {"id": "A", "lat": 33.640, "lon": -84.427, "kind": "TAXIWAY"},
            {"id": "B", "lat": 33.641, "lon": -84.427, "kind": "TAXIWAY"},
        ],
        "links": [{"a": "A", "b": "B"}],
    })
    graph = load_graph(path)
    assert graph.geodetic
    assert graph.links[0].length == pytest.approx(111.19, rel=0.01)


def test_classify_link_all_kinds():
    assert classify_link_kinds(NodeKind.RUNWAY, NodeKind.RUNWAY) is SpeedClass.RWY_RWY
    assert classify_link_kinds(NodeKind.RUNWAY, NodeKind.TAXIWAY) is SpeedClass.RWY_TXY
    assert classify_link_kinds(NodeKind.HOLD, NodeKind.RUNWAY) is SpeedClass.RWY_TXY
    assert classify_link_kinds(NodeKind.TAXIWAY, NodeKind.TAXIWAY) is SpeedClass.TXY_TXY
    assert classify_link_kinds(NodeKind.TAXIWAY, NodeKind.HOLD) is SpeedClass.OTHER
    assert classify_link_kinds(NodeKind.GATE, NodeKind.RAMP) is SpeedClass.OTHER
    assert classify_link_kinds(NodeKind.TAXILANE, NodeKind.TAXIWAY) is SpeedClass.OTHER
    # totality over every kind pair
    for a, b in itertools.product(NodeKind, NodeKind):
        assert classify_link_kinds(a, b) in SpeedClass


def test_speed_class_defaults():
    assert SpeedClass.RWY_RWY.value == (30.0, 10.0)
    assert SpeedClass.RWY_TXY.value == (25.0, 5.0)
    assert SpeedClass.TXY_TXY.value == (20.0, 5.0)
    assert SpeedClass.OTHER.value == (10.0, 5.0)
    params = SpeedClass.TXY_TXY.default_params()
    mean = math.exp(params.mu_log + params.sigma_log ** 2 / 2)
    assert mean == pytest.approx(20.0 * KT_TO_MS, rel=1e-12)


def test_link_destination_holding_point(haneda_graph):
    ranked = link_destination("holding point C5", haneda_graph, k=3)
    assert ranked[0][0] == "Txy_C5_C5B"
    assert ranked[0][1] == pytest.approx(1.0)


def test_link_destination_echo(katl_graph):
    ranked = link_destination("Echo", katl_graph, k=4)
    assert ranked[0][0] == "Txy_E_002"
    assert {nid for nid, _ in ranked} <= {"Txy_E_002", "Txy_E_003", "Txy_E_004", "Txy_E_005"}


def test_link_destination_gibberish(haneda_graph):
    assert link_destination("zzqq", haneda_graph) == []


def test_link_destination_case_invariant(haneda_graph):
    up = link_destination("HOLDING POINT C5", haneda_graph)
    lo = link_destination("holding point c5", haneda_graph)
    assert up == lo


def test_link_destination_empty_query(haneda_graph):
    with pytest.raises(EmptyQueryError):
        link_destination("   ", haneda_graph)


def test_resolve_destination_runway_entry(haneda_graph):
    assert resolve_destination(haneda_graph, "runway 34R") == "Rwy_03_001"
    # nearest runway node when the aircraft position is known
    assert resolve_destination(haneda_graph, "runway 34R", current_node="Txy_C5_C5B") == "Rwy_03_006"


def test_resolve_destination_phrase(katl_graph):
    assert resolve_destination(katl_graph, "Victor") == "Txy_V_003"
    assert resolve_destination(katl_graph, "Romeo") is None


def test_plan_trivial_single_node(haneda_graph):
    plan = shortest_taxi_plan(haneda_graph, "Rwy_03_001", "Rwy_03_001")
    assert plan.nodes == ["Rwy_03_001"]
    assert plan.links == []


def test_plan_triangle_prefers_two_hops(tmp_path):
    path = write_graph(tmp_path, {
        "nodes": [
            {"id": "A", "x": 0, "y": 0, "kind": "TAXIWAY"},
            {"id": "B", "x": 1, "y": 0, "kind": "TAXIWAY"},
            {"id": "C", "x": 2, "y": 0, "kind": "TAXIWAY"},
        ],
        "links": [
            {"a": "A", "b": "B", "length": 1.0},
            {"a": "B", "b": "C", "length": 1.0},
            {"a": "A", "b": "C", "length": 3.0},
        ],
    })
    graph = load_graph(path)
    plan = shortest_taxi_plan(graph, "A", "C")
    assert plan.nodes == ["A", "B", "C"]
    assert plan.total_length == pytest.approx(2.0)


def test_plan_via_membership(haneda_graph):
    # the direct Txy_C_001 -> Rwy_03_006 plan goes via C1 and the runway spine
    direct = shortest_taxi_plan(haneda_graph, "Txy_C_001", "Rwy_03_006")
    assert "Txy_C_005" not in direct.nodes
    plan = shortest_taxi_plan(haneda_graph, "Txy_C_001", "Rwy_03_006", via=["Txy_C_005"])
    assert "Txy_C_005" in plan.nodes


def test_plan_via_dead_end_reversal_is_no_path(tmp_path):
    path = write_graph(tmp_path, {
        "nodes": [
            {"id": "A", "x": 0, "y": 0, "kind": "TAXIWAY"},
            {"id": "B", "x": 1, "y": 0, "kind": "TAXIWAY"},
            {"id": "DEAD", "x": 1, "y": 1, "kind": "TAXIWAY"},
        ],
        "links": [
            {"a": "A", "b": "B", "length": 1.0},
            {"a": "B", "b": "DEAD", "length": 1.0},
        ],
    })
    with pytest.raises(NoPathError):
        shortest_taxi_plan(load_graph(path), "A", "B", via=["DEAD"])


def test_plan_unknown_node(haneda_graph):
    with pytest.raises(UnknownNodeError):
        shortest_taxi_plan(haneda_graph, "Txy_C_001", "NOWHERE")


def test_plan_no_path(tmp_path):
    path = write_graph(tmp_path, {
        "nodes": [
            {"id": "A", "x": 0, "y": 0, "kind": "TAXIWAY"},
            {"id": "B", "x": 1, "y": 0, "kind": "TAXIWAY"},
        ],
        "links": [],
    })
    with pytest.raises(NoPathError):
        shortest_taxi_plan(load_graph(path), "A", "B")


def test_plan_lexicographic_tiebreak(tmp_path):
    # two equal-cost routes A->B->D and A->C->D: the lexicographically
    # smaller node sequence must win
    path = write_graph(tmp_path, {
        "nodes": [{"id": nid, "x": 0, "y": 0, "kind": "TAXIWAY"} for nid in "ABCD"],
        "links": [
            {"a": "A", "b": "B", "length": 1.0},
            {"a": "A", "b": "C", "length": 1.0},
            {"a": "B", "b": "D", "length": 1.0},
            {"a": "C", "b": "D", "length": 1.0},
        ],
    })
    plan = shortest_taxi_plan(load_graph(path), "A", "D")
    assert plan.nodes == ["A", "B", "D"]


def brute_force_cost(graph, source, target):
    best = math.inf
    def dfs(node, seen, cost):
        nonlocal best
        if node == target:
            best = min(best, cost)
            return
        for other, link in graph.adjacency[node]:
            if other not in seen:
                dfs(other, seen | {other}, cost + link.length)
    dfs(source, {source}, 0.0)
    return best


def test_plan_optimality_vs_brute_force(tmp_path):
    rng = np.random.default_rng(99)
    for trial in range(20):
        n = int(rng.integers(4, 9))
        ids = [f"N{i}" for i in range(n)]
        links = []
        seen = set()
        for i in range(1, n):  # spanning chain keeps it connected
            links.append({"a": ids[i - 1], "b": ids[i], "length": float(rng.uniform(1, 10))})
            seen.add(frozenset((ids[i - 1], ids[i])))
        for _ in range(n):
            i, j = rng.integers(0, n, 2)
            pair = frozenset((ids[i], ids[j]))
            if i != j and pair not in seen:
                seen.add(pair)
                links.append({"a": ids[i], "b": ids[j], "length": float(rng.uniform(1, 10))})
        path = write_graph(tmp_path, {
            "nodes": [{"id": nid, "x": 0, "y": 0, "kind": "TAXIWAY"} for nid in ids],
            "links": links,
        }, name=f"rand{trial}.json")
        graph = load_graph(path)
        plan = shortest_taxi_plan(graph, ids[0], ids[-1])
        assert plan.total_length == pytest.approx(brute_force_cost(graph, ids[0], ids[-1]))


def test_plan_overlap_cases(haneda_graph):
    p1 = plan_from_nodes(haneda_graph, ["Txy_C_001", "Txy_C_002", "Txy_C_003"])
    p2 = plan_from_nodes(haneda_graph, ["Rwy_03_001", "Rwy_03_002", "Rwy_03_003"])
    assert plan_overlap(p1, p2) == []
    assert plan_overlap(p1, p1) == p1.nodes
    p3 = plan_from_nodes(haneda_graph, ["Txy_C5_C5B", "Rwy_03_006", "Rwy_03_007"])
    p4 = plan_from_nodes(haneda_graph, ["Rwy_03_005", "Rwy_03_006", "Txy_C5_C5B"])
    assert plan_overlap(p3, p4) == ["Txy_C5_C5B", "Rwy_03_006"]


def test_plan_from_nodes_requires_adjacency(haneda_graph):
    with pytest.raises(NoPathError):
        plan_from_nodes(haneda_graph, ["Txy_C_001", "Rwy_03_006"])
