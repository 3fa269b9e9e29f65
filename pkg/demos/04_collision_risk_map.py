"""Collision risk over the nodes two taxi plans share.

Replays the runway-incursion geometry: one aircraft taxis from the C5 holding
point onto the runway while another is rolling out after landing.  Every node
both plans touch gets a probability; the first merge node carries the highest
risk, and the independent Monte Carlo oracle confirms the analytic value.
"""

import taxisentinel as ts
from taxisentinel.risk import risk_map

scenario = ts.load_scenario(ts.data_path("fixtures/scenarios/haneda_scenario.json"))
ac1, ac2 = scenario.aircraft
print(f"aircraft 1: {ac1.callsign}  start t={ac1.start_time:.0f}s  route {' -> '.join(ac1.plan.nodes)}")
print(f"aircraft 2: {ac2.callsign}  start t={ac2.start_time:.0f}s  route of {len(ac2.plan.nodes)} runway nodes")
print(f"collision radius r_c = {scenario.r_c} m\n")

scores = risk_map(ac1.plan, ac2.plan, scenario.graph, scenario.r_c,
                  ac1.start_time, ac2.start_time)
print(f"{'node':<14} {'P(collision)':>12} {'overlap 1/s':>12} {'E[1/v] s/m':>11}")
for s in scores:
    print(f"{s.node:<14} {s.probability:>12.5f} {s.overlap_density:>12.6f} {s.inv_speed_expectation:>11.5f}")

best = max(scores, key=lambda s: s.probability)
print(f"\nhighest risk at {best.node}")

p_hat, se = ts.mc_collision_oracle(scenario, best.node)
analytic = best.probability
print(f"Monte Carlo oracle at {best.node}: {p_hat:.5f} +/- {se:.5f} "
      f"(analytic {analytic:.5f}, {abs(analytic - p_hat) / se:.1f} s.e. apart)")
