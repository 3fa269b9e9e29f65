"""Ground-movement replay frames and link-speed fitting from surface tracks.

First replays one sampled realization of the taxiway-collision scenario as
position snapshots, then runs the data side: extract per-link speed samples
from a synthetic surface track, fit log-normals, and test whether aircraft
weight class shifts taxi speed.
"""

import taxisentinel as ts
from taxisentinel.speedfit import (
    anova_f,
    fit_link_reports,
    kruskal_wallis,
    link_speed_extract,
    read_track_csv,
)

scenario = ts.load_scenario(ts.data_path("fixtures/scenarios/katl_scenario.json"))
frames = ts.replay(scenario, sample_index=0, time_step=10.0)
print(f"replay: {len(frames)} frames at 10 s steps")
for frame in frames[::2]:
    parts = []
    for callsign, state in frame.positions.items():
        flag = "done" if state["completed"] else f"{state['fraction']:.2f} along {state['link']}"
        parts.append(f"{callsign}: {flag}")
    print(f"  t={frame.time:6.1f}s  " + "   ".join(parts))

graph = ts.load_graph(ts.data_path("fixtures/katl_graph.json"))
track = read_track_csv(ts.data_path("fixtures/katl_track.csv"))
samples = link_speed_extract(track, graph)
print(f"\ntrack points: {len(track)}, accepted speed samples: {len(samples)}")

reports, skipped = fit_link_reports(samples)
for rep in reports:
    print(f"  {rep.link:<24} n={rep.n:<3} mu_log={rep.params.mu_log:.3f} "
          f"sigma_log={rep.params.sigma_log:.3f}  KS D={rep.ks_statistic:.3f} p={rep.ks_p_value:.3f}")

import json

entries = json.loads(ts.data_path("fixtures/weight_class_samples.json").read_text())
groups: dict[str, list[float]] = {}
for e in entries:
    groups.setdefault(e["weight_class"], []).append(e["speed"])
names = sorted(groups)
f, p_f = anova_f([groups[k] for k in names])
h, p_h = kruskal_wallis([groups[k] for k in names])
print(f"\nweight-class effect on taxi speed across {names}:")
print(f"  ANOVA          F = {f:.3f}, p = {p_f:.4f}")
print(f"  Kruskal-Wallis H = {h:.3f}, p = {p_h:.4f}")
