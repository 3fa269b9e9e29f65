"""Regenerate the bundled fixture files under src/taxisentinel/data/fixtures.

Everything here is deterministic; run from the repo root:

    python tools/make_fixtures.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from taxisentinel import compile_ruleset, match_rules
from taxisentinel.airport import KT_TO_MS
from taxisentinel.evaluation import AnnotatedUtterance, degrade_gold, save_annotations
from taxisentinel.rules import EntityLabel, EntitySpan, SpanSource
from taxisentinel.traveltime import from_physical_moments

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "src" / "taxisentinel" / "data" / "fixtures"
SCENARIOS = FIXTURES / "scenarios"


def node(nid, name, x, y, kind):
    return {"id": nid, "name": name, "x": x, "y": y, "kind": kind}


def link(a, b, **extra):
    return {"a": a, "b": b, **extra}


# ---------------------------------------------------------------- graphs

def haneda_graph() -> dict:
    """Stylized runway 34R spine with taxiway C and its C1/C5 holding points."""
    nodes = []
    links = []
    for i in range(1, 11):
        nodes.append(node(f"Rwy_03_{i:03d}", "runway 34R", 0.0, 333.0 * (i - 1), "RUNWAY"))
    for i in range(1, 10):
        links.append(link(f"Rwy_03_{i:03d}", f"Rwy_03_{i + 1:03d}"))
    taxi_y = [200.0, 600.0, 1000.0, 1400.0, 1800.0]
    for i, y in enumerate(taxi_y, start=1):
        nodes.append(node(f"Txy_C_{i:03d}", "taxiway C", 150.0, y, "TAXIWAY"))
    for i in range(1, 5):
        links.append(link(f"Txy_C_{i:03d}", f"Txy_C_{i + 1:03d}"))
    nodes.append(node("Txy_C1_C", "holding point C1", 90.0, 333.0, "HOLD"))
    nodes.append(node("Txy_C5_C5B", "holding point C5", 90.0, 1665.0, "HOLD"))
    links.append(link("Txy_C_001", "Txy_C1_C"))
    links.append(link("Txy_C1_C", "Rwy_03_002"))
    links.append(link("Txy_C_005", "Txy_C5_C5B"))
    links.append(link("Txy_C5_C5B", "Rwy_03_006"))
    return {"nodes": nodes, "links": links}


def katl_graph() -> dict:
    """Stylized KATL corner: runway 08R, taxiway Echo, taxiway Victor."""
    nodes = [
        node("Rwy_02_001", "runway 08R", 0.0, 0.0, "RUNWAY"),
        node("Rwy_02_002", "runway 08R", 400.0, 0.0, "RUNWAY"),
        node("Rwy_02_003", "runway 08R", 800.0, 0.0, "RUNWAY"),
        node("Txy_E_002", "taxiway Echo", 0.0, 200.0, "TAXIWAY"),
        node("Txy_E_003", "taxiway Echo", 400.0, 200.0, "TAXIWAY"),
        node("Txy_E_004", "taxiway Echo", 800.0, 200.0, "TAXIWAY"),
        node("Txy_E_005", "taxiway Echo", 1200.0, 200.0, "TAXIWAY"),
        node("Txy_V_003", "taxiway Victor", 400.0, 500.0, "TAXIWAY"),
        node("Txy_V_004", "taxiway Victor", 400.0, 800.0, "TAXIWAY"),
    ]
    links = [
        link("Rwy_02_001", "Rwy_02_002"),
        link("Rwy_02_002", "Rwy_02_003"),
        link("Txy_E_002", "Txy_E_003"),
        link("Txy_E_003", "Txy_E_004"),
        link("Txy_E_004", "Txy_E_005"),
        link("Txy_V_003", "Txy_V_004"),
        link("Txy_V_003", "Txy_E_003"),
        link("Txy_E_002", "Rwy_02_001"),
    ]
    return {"nodes": nodes, "links": links}


# Monte-Carlo oracle chains: overrides keep every sigma_log <= 0.3 and the
# trailing aircraft's entering/departing links in the same speed class.
SPD_SLOW = {"speed_mean_kt": 10.0, "speed_std_kt": 2.5}
SPD_RTX = {"speed_mean_kt": 25.0, "speed_std_kt": 5.0}
SPD_TXY = {"speed_mean_kt": 20.0, "speed_std_kt": 5.0}
SPD_RWY = {"speed_mean_kt": 30.0, "speed_std_kt": 5.0}
SPD_FOLLOW = {"speed_mean_kt": 20.0, "speed_std_kt": 3.0}
SPD_LOW = {"speed_mean_kt": 20.0, "speed_std_kt": 2.0}


def mc_paths_graph() -> dict:
    nodes = []
    links = []

    def chain(prefix, count, x0, y0):
        ids = [f"{prefix}{i:02d}" for i in range(1, count + 1)]
        for i, nid in enumerate(ids):
            nodes.append(node(nid, "", x0 + 500.0 * i, y0, "TAXIWAY"))
        return ids

    # runway merge: lander RM_R01..RM_R08, taxi aircraft joins at RM_R06
    rm = chain("RM_R", 8, 0.0, 0.0)
    for a, b in zip(rm, rm[1:]):
        links.append(link(a, b, length=320.0, **SPD_RWY))
    rt = chain("RM_T", 2, 1400.0, 300.0)
    links.append(link(rt[0], rt[1], length=160.0, **SPD_SLOW))
    links.append(link(rt[1], rm[5], length=90.0, **SPD_RTX))

    # taxi crossing: A-chain crossed by B-chain at TC_A05
    tca = chain("TC_A", 7, 0.0, 1000.0)
    for (a, b), d in zip(zip(tca, tca[1:]), [210.0, 180.0, 240.0, 200.0, 220.0, 200.0]):
        links.append(link(a, b, length=d, **SPD_TXY))
    tcb = chain("TC_B", 6, 0.0, 1500.0)
    for (a, b), d in zip(zip(tcb[:4], tcb[1:4]), [190.0, 230.0, 210.0]):
        links.append(link(a, b, length=d, **SPD_TXY))
    links.append(link(tcb[3], tca[4], length=180.0, **SPD_TXY))
    links.append(link(tca[4], tcb[4], length=210.0, **SPD_TXY))
    links.append(link(tcb[4], tcb[5], length=190.0, **SPD_TXY))

    # same-route following: F01..F08
    fl = chain("FL_N", 8, 0.0, 2000.0)
    for a, b in zip(fl, fl[1:]):
        links.append(link(a, b, length=180.0, **SPD_FOLLOW))

    # heterogeneous merge at ML_X
    mla = chain("ML_A", 6, 0.0, 2500.0)
    nodes.append(node("ML_X", "", 3000.0, 2500.0, "TAXIWAY"))
    nodes.append(node("ML_A07", "", 3500.0, 2500.0, "TAXIWAY"))
    for (a, b), (d, spd) in zip(
        zip(mla, mla[1:]),
        [(100.0, SPD_SLOW), (150.0, SPD_RTX), (120.0, SPD_TXY), (160.0, SPD_TXY), (140.0, SPD_TXY)],
    ):
        links.append(link(a, b, length=d, **spd))
    links.append(link(mla[5], "ML_X", length=110.0, **SPD_TXY))
    links.append(link("ML_X", "ML_A07", length=150.0, **SPD_TXY))
    mlb = chain("ML_B", 4, 0.0, 3000.0)
    for (a, b), (d, spd) in zip(zip(mlb, mlb[1:]), [(240.0, SPD_RTX), (260.0, SPD_TXY), (200.0, SPD_TXY)]):
        links.append(link(a, b, length=d, **spd))
    links.append(link(mlb[3], "ML_X", length=180.0, **SPD_TXY))
    nodes.append(node("ML_B05", "", 3500.0, 3000.0, "TAXIWAY"))
    nodes.append(node("ML_B06", "", 4000.0, 3000.0, "TAXIWAY"))
    links.append(link("ML_X", "ML_B05", length=180.0, **SPD_TXY))
    links.append(link("ML_B05", "ML_B06", length=150.0, **SPD_TXY))

    # well-separated starts, low overlap
    dsa = chain("DS_A", 4, 0.0, 3500.0)
    nodes.append(node("DS_X", "", 2000.0, 3500.0, "TAXIWAY"))
    nodes.append(node("DS_A05", "", 2500.0, 3500.0, "TAXIWAY"))
    for a, b in zip(dsa, dsa[1:]):
        links.append(link(a, b, length=200.0, **SPD_LOW))
    links.append(link(dsa[3], "DS_X", length=200.0, **SPD_LOW))
    links.append(link("DS_X", "DS_A05", length=200.0, **SPD_LOW))
    dsb = chain("DS_B", 4, 0.0, 4000.0)
    for a, b in zip(dsb, dsb[1:]):
        links.append(link(a, b, length=200.0, **SPD_LOW))
    links.append(link(dsb[3], "DS_X", length=200.0, **SPD_LOW))
    nodes.append(node("DS_B06", "", 2500.0, 4000.0, "TAXIWAY"))
    links.append(link("DS_X", "DS_B06", length=200.0, **SPD_LOW))

    return {"nodes": nodes, "links": links}


def _mean_time(d_m: float, mean_kt: float, std_kt: float) -> float:
    params = from_physical_moments(mean_kt * KT_TO_MS, std_kt * KT_TO_MS)
    return d_m * math.exp(-params.mu_log + params.sigma_log ** 2 / 2)


def mc_scenarios() -> dict[str, dict]:
    """Start offsets are chosen so the trailing (second-listed) aircraft's
    mean arrival at the spot lags the leader's by `sep` seconds."""

    def spd(d, s):
        return _mean_time(d, s["speed_mean_kt"], s["speed_std_kt"])

    scenarios = {}

    m_taxi = spd(160, SPD_SLOW) + spd(90, SPD_RTX)
    m_land = 5 * spd(320, SPD_RWY)
    scenarios["mc_runway_merge"] = {
        "graph": "../mc_paths.json",
        "aircraft": [
            {"callsign": "TAXI1", "nodes": ["RM_T01", "RM_T02", "RM_R06", "RM_R07", "RM_R08"],
             "start_time": round(m_land - m_taxi + 0.0, 3)},
            {"callsign": "LANDER", "nodes": ["RM_R01", "RM_R02", "RM_R03", "RM_R04", "RM_R05", "RM_R06", "RM_R07", "RM_R08"],
             "start_time": 2.0},
        ],
        "spot": "RM_R06",
        "r_c": 8.0,
        "seed": 101,
        "samples": 1000000,
    }

    m_a = sum(spd(d, SPD_TXY) for d in [210, 180, 240, 200])
    m_b = sum(spd(d, SPD_TXY) for d in [190, 230, 210, 180])
    scenarios["mc_taxi_cross"] = {
        "graph": "../mc_paths.json",
        "aircraft": [
            {"callsign": "ALPHA", "nodes": ["TC_A01", "TC_A02", "TC_A03", "TC_A04", "TC_A05", "TC_A06", "TC_A07"],
             "start_time": 0.0},
            {"callsign": "BRAVO", "nodes": ["TC_B01", "TC_B02", "TC_B03", "TC_B04", "TC_A05", "TC_B05", "TC_B06"],
             "start_time": round(m_a - m_b + 1.5, 3)},
        ],
        "spot": "TC_A05",
        "r_c": 9.0,
        "seed": 102,
        "samples": 1000000,
    }

    follow_nodes = [f"FL_N{i:02d}" for i in range(1, 9)]
    scenarios["mc_follow"] = {
        "graph": "../mc_paths.json",
        "aircraft": [
            {"callsign": "LEAD", "nodes": follow_nodes, "start_time": 0.0},
            {"callsign": "TRAIL", "nodes": follow_nodes, "start_time": 1.5},
        ],
        "spot": "FL_N06",
        "r_c": 4.0,
        "seed": 103,
        "samples": 1000000,
    }

    m_a = spd(100, SPD_SLOW) + spd(150, SPD_RTX) + sum(spd(d, SPD_TXY) for d in [120, 160, 140, 110])
    m_b = spd(240, SPD_RTX) + sum(spd(d, SPD_TXY) for d in [260, 200, 180])
    scenarios["mc_mixed_long"] = {
        "graph": "../mc_paths.json",
        "aircraft": [
            {"callsign": "MIXED1", "nodes": ["ML_A01", "ML_A02", "ML_A03", "ML_A04", "ML_A05", "ML_A06", "ML_X", "ML_A07"],
             "start_time": 0.0},
            {"callsign": "MIXED2", "nodes": ["ML_B01", "ML_B02", "ML_B03", "ML_B04", "ML_X", "ML_B05", "ML_B06"],
             "start_time": round(m_a - m_b + 0.5, 3)},
        ],
        "spot": "ML_X",
        "r_c": 7.0,
        "seed": 104,
        "samples": 1000000,
    }

    m_a = 4 * spd(200, SPD_LOW)
    m_b = 4 * spd(200, SPD_LOW)
    scenarios["mc_distant"] = {
        "graph": "../mc_paths.json",
        "aircraft": [
            {"callsign": "FIRST", "nodes": ["DS_A01", "DS_A02", "DS_A03", "DS_A04", "DS_X", "DS_A05"],
             "start_time": 0.0},
            {"callsign": "LATER", "nodes": ["DS_B01", "DS_B02", "DS_B03", "DS_B04", "DS_X", "DS_B06"],
             "start_time": round(m_a - m_b + 22.0, 3)},
        ],
        "spot": "DS_X",
        "r_c": 12.0,
        "seed": 105,
        "samples": 1000000,
    }
    return scenarios


def case_scenarios() -> dict[str, dict]:
    return {
        "haneda_scenario": {
            "graph": "../haneda_graph.json",
            "aircraft": [
                {"callsign": "JA722A",
                 "nodes": ["Txy_C_004", "Txy_C_005", "Txy_C5_C5B", "Rwy_03_006", "Rwy_03_007", "Rwy_03_008"],
                 "start_time": 63919.0},
                {"callsign": "JAL516",
                 "nodes": ["Rwy_03_001", "Rwy_03_002", "Rwy_03_003", "Rwy_03_004", "Rwy_03_005",
                            "Rwy_03_006", "Rwy_03_007", "Rwy_03_008", "Rwy_03_009", "Rwy_03_010"],
                 "start_time": 63888.0},
            ],
            "r_c": 32.5,
            "seed": 20240102,
            "samples": 1000000,
        },
        "katl_scenario": {
            "graph": "../katl_graph.json",
            "aircraft": [
                {"callsign": "EDV5526",
                 "nodes": ["Txy_V_004", "Txy_V_003", "Txy_E_003", "Txy_E_002", "Rwy_02_001"],
                 "start_time": 114.0},
                {"callsign": "DAL295",
                 "nodes": ["Txy_E_005", "Txy_E_004", "Txy_E_003", "Txy_E_002", "Rwy_02_001"],
                 "start_time": 105.0},
            ],
            "r_c": 32.5,
            "seed": 20240910,
            "samples": 1000000,
        },
    }


# ---------------------------------------------------------------- transcripts

HANEDA_TRANSCRIPT = [
    ("17:43:02", "TWR", "Japan Air 516, Tokyo Tower, good evening, number 2 on approach, expect runway 34R, departure traffic ahead."),
    ("17:43:12", "JAL516", "Japan Air 516, reduce speed, approach runway 34R, number 2."),
    ("17:43:26", "TWR", "Delta 276, Tokyo Tower, good evening, taxi to holding point C1, runway 34R."),
    ("17:44:56", "TWR", "Japan Air 516, runway 34R, cleared to land, wind 320 at 7."),
    ("17:45:01", "JAL516", "Japan Air 516, runway 34R, cleared to land, thank you."),
    ("17:45:11", "TWR", "JA722A, Tokyo Tower, good evening, number 1, taxi to holding point C5."),
    ("17:45:19", "JA722A", "JA722A, taxi to holding point C5, number 1, thank you."),
    ("17:45:40", "TWR", "Japan Air 179, Tokyo Tower, good evening, number 3, taxi to holding point C1."),
    ("17:45:56", "TWR", "Japan Air 166, Tokyo Tower, good evening, number 2 on approach, runway 34R."),
    ("17:46:30", "TWR", "Wind check, 320 at 8 knots."),
    ("17:47:23", "TWR", "Japan Air 166, reduce to minimum approach speed."),
    ("17:47:27", "JAL166", "Japan Air 166, Tokyo Tower, roger."),
    ("17:47:30", "TWR", "Japan Air 516, collision on the runway, emergency vehicles responding."),
    ("17:47:30", "TWR", "JA722A, collision on the runway, emergency vehicles responding."),
]

KATL_TRANSCRIPT = [
    ("0:08", "GND", "Delta 295, Atlanta Ground, good morning, runway 08R, taxi via Romeo."),
    ("0:14", "DAL295", "Delta 295, roger, taxi to runway 08R."),
    ("0:20", "DAL295", "Delta 295, Taxi via foxtrot, thanks."),
    ("0:33", "GND", "Delta 295, continue ahead, hold short of ramp 5."),
    ("0:44", "GND", "Delta 295, give way to the inbound CRJ, then join Echo."),
    ("0:50", "DAL295", "Delta 295, give way to that traffic, thank you."),
    ("0:57", "GND", "Endeavor 5526, Atlanta Ground, good morning, taxi to runway 08R."),
    ("1:10", "GND", "Ground, say again for the company traffic?"),
    ("1:27", "GND", "Delta 295, go ahead please."),
    ("1:35", "GND", "Delta 295, continue, then hold your position."),
    ("1:45", "DAL295", "Delta 295, holding at Victor."),
    ("1:54", "GND", "Endeavor 5526, line up and wait."),
    ("2:10", "GND", "Endeavor 5526, collision with company traffic reported."),
    ("2:10", "GND", "Delta 295, collision with company traffic reported."),
]


# ---------------------------------------------------------------- mini corpus

MINI_CORPUS_TEXTS = [
    "Japan Air 516, Tokyo Tower, continue approach, runway 34R.",
    "Delta 295, give way to the CRJ, then join Echo.",
    "Endeavor 5526, line up and wait, runway 08R.",
    "JA722A, taxi to holding point C5.",
    "Japan Air 179, Tokyo Tower, good evening, number 3, taxi to holding point C1.",
    "Delta 276, hold short of ramp 5.",
    "Speed bird two five, cleared to land, runway 27.",
    "Delta 295, Taxi via foxtrot to runway 08R.",
    "Japan Air 166, go around, departure traffic on the runway.",
    "Endeavor 5526, continue via Victor, give way to company traffic.",
    "JA722A, holding at holding point C5, number 1.",
    "Delta 295, collision reported at the intersection.",
    "Japan Air 516, runway 34R, cleared to land, wind 320 at 8.",
    "Delta 276, taxi to holding point C1, runway 34R.",
    "Endeavor 5526, wait at Romeo, inbound traffic.",
    "Japan Air 166, approach runway 34R, reduce speed.",
    "Delta 295, go ahead to ramp 5.",
    "JA722A, line up and wait, runway 34R.",
    "Speed bird two five, taxi via Sierra, hold short of runway 27.",
    "Japan Air 516, departure frequency, good day.",
    "Delta 295, join Echo, then continue to the gate.",
    "Endeavor 5526, taxi to runway 08R via Victor.",
    "Japan Air 179, cleared for takeoff, wind calm.",
    "Delta 276, approach Tokyo, expect runway 34R.",
]

# gold entities the bundled rules do not cover: (text index, phrase, label)
EXTRA_GOLD = [
    (11, "the intersection", "DESTINATION"),
    (19, "departure frequency", "DESTINATION"),
    (20, "the gate", "DESTINATION"),
    (22, "takeoff", "ACSTATE"),
    (8, "go around", "ACSTATE"),
]


def build_mini_corpus() -> tuple[list[AnnotatedUtterance], list]:
    rules = compile_ruleset()
    extra_by_index: dict[int, list[tuple[str, str]]] = {}
    for idx, phrase, label in EXTRA_GOLD:
        extra_by_index.setdefault(idx, []).append((phrase, label))
    gold = []
    for i, text in enumerate(MINI_CORPUS_TEXTS):
        spans = [
            EntitySpan(start=s.start, end=s.end, label=s.label, surface=s.surface,
                       source=SpanSource.EXTERNAL)
            for s in match_rules(rules, text)
        ]
        for phrase, label in extra_by_index.get(i, []):
            start = text.index(phrase)
            candidate = EntitySpan(start=start, end=start + len(phrase),
                                   label=EntityLabel[label], surface=phrase,
                                   source=SpanSource.EXTERNAL)
            if not any(candidate.overlaps(s) for s in spans):
                spans.append(candidate)
        spans.sort(key=lambda s: s.start)
        gold.append(AnnotatedUtterance(text=text, gold=spans))
    external = degrade_gold(gold, delete_frac=0.3, mislabel_frac=0.1, seed=7)
    return gold, external


# ---------------------------------------------------------------- tracks

def katl_track_csv() -> str:
    """Synthetic ASDE-X style surface track along taxiway Echo (plus one
    stationary stretch and one far-off-graph stretch for the gating paths)."""
    rng = np.random.default_rng(20230508)
    rows = ["time,callsign,x,y,weight_class"]
    specs = [
        ("DAL100", "HEAVY", 10.5), ("EDV200", "LARGE", 9.0),
        ("DAL300", "HEAVY", 11.0), ("EDV400", "SMALL", 8.0),
    ]
    for k, (callsign, wclass, base) in enumerate(specs):
        t = 10.0 * k
        x = 1200.0
        for _ in range(30):
            v = base * float(rng.lognormal(0.0, 0.08))
            dt = 2.0
            x = max(0.0, x - v * dt)
            t += dt
            y = 200.0 + float(rng.normal(0.0, 1.5))
            rows.append(f"{t:.1f},{callsign},{x:.2f},{y:.2f},{wclass}")
    # stationary aircraft at the ramp edge
    for i in range(5):
        rows.append(f"{500 + 2 * i:.1f},HOLDER,650.00,205.00,LARGE")
    # a vehicle far from any link
    for i in range(4):
        rows.append(f"{600 + 2 * i:.1f},TRUCK1,{5000 + 20 * i:.2f},5000.00,SMALL")
    return "\n".join(rows) + "\n"


def weight_class_samples() -> list[dict]:
    """Synthetic per-weight-class speed samples on two Echo links."""
    rng = np.random.default_rng(73)
    mus = {"SMALL": 8.2, "LARGE": 9.0, "HEAVY": 9.6, "SUPER": 10.1}
    out = []
    for link_id in ["Txy_E_004-Txy_E_003", "Txy_E_003-Txy_E_002"]:
        for wclass, mu in mus.items():
            speeds = rng.lognormal(math.log(mu), 0.18, 30)
            for i, v in enumerate(speeds):
                out.append({"link": link_id, "timestamp": float(10 * i),
                            "speed": round(float(v), 4), "weight_class": wclass})
    return out


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    SCENARIOS.mkdir(parents=True, exist_ok=True)

    (FIXTURES / "haneda_graph.json").write_text(json.dumps(haneda_graph(), indent=2) + "\n")
    (FIXTURES / "katl_graph.json").write_text(json.dumps(katl_graph(), indent=2) + "\n")
    (FIXTURES / "mc_paths.json").write_text(json.dumps(mc_paths_graph(), indent=2) + "\n")

    for name, transcript in [("haneda_transcript", HANEDA_TRANSCRIPT), ("katl_transcript", KATL_TRANSCRIPT)]:
        lines = [json.dumps({"time": t, "speaker": spk, "text": txt}) for t, spk, txt in transcript]
        (FIXTURES / f"{name}.jsonl").write_text("\n".join(lines) + "\n")

    for name, scenario in {**mc_scenarios(), **case_scenarios()}.items():
        (SCENARIOS / f"{name}.json").write_text(json.dumps(scenario, indent=2) + "\n")

    gold, external = build_mini_corpus()
    save_annotations(FIXTURES / "mini_corpus.json", gold)
    payload = [
        {"text": utt.text, "entities": [[s.start, s.end, s.label.value] for s in preds]}
        for utt, preds in zip(gold, external)
    ]
    (FIXTURES / "mini_corpus_external.json").write_text(json.dumps(payload, indent=2) + "\n")

    (FIXTURES / "katl_track.csv").write_text(katl_track_csv())
    (FIXTURES / "weight_class_samples.json").write_text(
        json.dumps(weight_class_samples(), indent=2) + "\n"
    )
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
