from __future__ import annotations

import json
import math

import numpy as np
import pytest

from taxisentinel import data_path
from taxisentinel.airport import KT_TO_MS, load_graph, plan_from_nodes
from taxisentinel.errors import EmptyPlanError, MalformedFileError, SpotNotSharedError
from taxisentinel.montecarlo import (
    AircraftSpec,
    ScenarioConfig,
    load_scenario,
    mc_collision_oracle,
    replay,
    sample_route_times,
)
from taxisentinel.traveltime import fw_compose, link_time_dist


def make_graph(tmp_path, sigma=0.2, length=100.0, mean_kt=10.0 / KT_TO_MS):
    # default mean is exactly 10 m/s; cv set via std
    std_kt = mean_kt * math.sqrt(math.expm1(sigma ** 2))
    payload = {
        "nodes": [{"id": f"N{i}", "x": 0.0, "y": float(i) * length, "kind": "TAXIWAY"} for i in range(6)],
        "links": [
            {"a": f"N{i}", "b": f"N{i+1}", "length": length,
             "speed_mean_kt": mean_kt, "speed_std_kt": std_kt}
            for i in range(5)
        ],
    }
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(payload))
    return load_graph(path)


def test_sample_route_times_zero_variance_limit(tmp_path):
    graph = make_graph(tmp_path, sigma=1e-8)
    plan = plan_from_nodes(graph, ["N0", "N1"])
    samples = sample_route_times(plan, graph, 100, seed=1)
    assert np.allclose(samples, 100.0 / 10.0, rtol=1e-6)


def test_sample_route_times_mean_matches_fw(tmp_path):
    graph = make_graph(tmp_path, sigma=0.25)
    plan = plan_from_nodes(graph, ["N0", "N1", "N2"])
    comp = fw_compose([link_time_dist(lk.length, lk.speed_params) for lk in plan.links])
    n = 10 ** 5
    samples = sample_route_times(plan, graph, n, seed=7)
    assert abs(samples.mean() - comp.M) <= 3 * math.sqrt(comp.V / n)


def test_sample_route_times_deterministic(tmp_path):
    graph = make_graph(tmp_path)
    plan = plan_from_nodes(graph, ["N0", "N1", "N2", "N3"])
    a = sample_route_times(plan, graph, 1000, seed=99)
    b = sample_route_times(plan, graph, 1000, seed=99)
    assert np.array_equal(a, b)
    c = sample_route_times(plan, graph, 1000, seed=100)
    assert not np.array_equal(a, c)


def test_sample_route_times_empty_plan(tmp_path):
    graph = make_graph(tmp_path)
    plan = plan_from_nodes(graph, ["N0"])
    with pytest.raises(EmptyPlanError):
        sample_route_times(plan, graph, 10, seed=1)


def scenario_on(graph, nodes1, nodes2, start1, start2, r_c=5.0, seed=5, samples=20000):
    return ScenarioConfig(
        graph=graph,
        aircraft=[
            AircraftSpec("AC1", plan_from_nodes(graph, nodes1, "AC1", start1), start1),
            AircraftSpec("AC2", plan_from_nodes(graph, nodes2, "AC2", start2), start2),
        ],
        r_c=r_c,
        rng_seed=seed,
        sample_count=samples,
    )


def test_oracle_delayed_start_never_collides(tmp_path):
    graph = make_graph(tmp_path)
    sc = scenario_on(graph, ["N0", "N1", "N2"], ["N0", "N1", "N2"], 0.0, 1e6)
    p_hat, se = mc_collision_oracle(sc, "N1")
    assert p_hat == 0.0


def test_oracle_forced_co_arrival(tmp_path):
    graph = make_graph(tmp_path, sigma=1e-6)
    sc = scenario_on(graph, ["N0", "N1"], ["N0", "N1"], 0.0, 0.0)
    p_hat, se = mc_collision_oracle(sc, "N1")
    assert p_hat == pytest.approx(1.0)


def test_oracle_spot_not_shared(tmp_path):
    graph = make_graph(tmp_path)
    sc = scenario_on(graph, ["N0", "N1"], ["N0", "N1", "N2"], 0.0, 0.0)
    with pytest.raises(SpotNotSharedError):
        mc_collision_oracle(sc, "N2")


def test_scenario_needs_two_aircraft(tmp_path):
    graph = make_graph(tmp_path)
    with pytest.raises(MalformedFileError):
        ScenarioConfig(graph=graph,
                       aircraft=[AircraftSpec("X", plan_from_nodes(graph, ["N0", "N1"]), 0.0)],
                       r_c=5.0, rng_seed=1, sample_count=10)


def test_load_scenario_fixture():
    sc = load_scenario(data_path("fixtures/scenarios/haneda_scenario.json"))
    assert [ac.callsign for ac in sc.aircraft] == ["JA722A", "JAL516"]
    assert sc.r_c == 32.5
    assert sc.aircraft[0].plan.nodes[0] == "Txy_C_004"


def test_replay_positions_and_frame_count(tmp_path):
    graph = make_graph(tmp_path, sigma=1e-9)
    sc = scenario_on(graph, ["N0", "N1", "N2"], ["N1", "N2"], 5.0, 12.0)
    step = 1.0
    frames = replay(sc, sample_index=0, time_step=step)
    # frame count is ceil(span / step) + 1 with the span set by the drawn speeds
    done1 = 5.0 + sample_route_times(sc.aircraft[0].plan, graph, 1, seed=5, aircraft_index=0)[0]
    done2 = 12.0 + sample_route_times(sc.aircraft[1].plan, graph, 1, seed=5, aircraft_index=1)[0]
    span = max(done1, done2) - 5.0
    assert len(frames) == math.ceil(span / step) + 1
    assert span == pytest.approx(20.0, rel=1e-6)  # v is 10 m/s up to the tiny sigma
    first = frames[0]
    assert first.time == 5.0
    assert first.positions["AC1"]["fraction"] == 0.0
    assert first.positions["AC2"]["fraction"] == 0.0  # not yet started, held at first link
    # constant speed: fraction at t = (t - start) * v / d
    mid = frames[3]  # t = 8
    assert mid.positions["AC1"]["fraction"] == pytest.approx((8.0 - 5.0) * 10.0 / 100.0, rel=1e-6)
    last = frames[-1]
    assert last.positions["AC1"]["completed"] is True
    assert last.positions["AC1"]["x"] == graph.nodes["N2"].x
    assert last.positions["AC1"]["y"] == graph.nodes["N2"].y


def test_replay_monotone_progress(tmp_path):
    graph = make_graph(tmp_path, sigma=0.3)
    sc = scenario_on(graph, ["N0", "N1", "N2", "N3"], ["N0", "N1"], 0.0, 3.0)
    frames = replay(sc, sample_index=4, time_step=0.5)
    for callsign in ("AC1", "AC2"):
        ys = [f.positions[callsign]["y"] for f in frames]
        assert all(a <= b + 1e-9 for a, b in zip(ys, ys[1:]))


def test_replay_sample_consistency_with_route_sampling(tmp_path):
    # the k-th replay must move at exactly the k-th sampled speeds
    graph = make_graph(tmp_path, sigma=0.25)
    nodes = ["N0", "N1", "N2"]
    start = 2.0
    sc = scenario_on(graph, nodes, ["N0", "N1"], start, 50.0, seed=31)
    k = 7
    frames = replay(sc, sample_index=k, time_step=0.25)
    plan = sc.aircraft[0].plan
    totals = sample_route_times(plan, graph, k + 1, seed=31, aircraft_index=0)
    expected_completion = start + totals[k]
    completed = [f.time for f in frames if f.positions["AC1"]["completed"]]
    assert completed, "aircraft never completed in replay window"
    first_done = min(completed)
    assert first_done - 0.25 <= expected_completion <= first_done + 1e-9


def test_replay_rejects_bad_args(tmp_path):
    graph = make_graph(tmp_path)
    sc = scenario_on(graph, ["N0", "N1"], ["N0", "N1"], 0.0, 0.0)
    with pytest.raises(MalformedFileError):
        replay(sc, sample_index=0, time_step=0.0)
    with pytest.raises(MalformedFileError):
        replay(sc, sample_index=-1, time_step=1.0)
