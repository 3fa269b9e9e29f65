"""Composing link travel times into a route distribution.

A taxi route is a chain of links, each with a log-normal speed; the route time
is the sum of the link times.  The moment-matched log-normal (Fenton-Wilkinson)
is compared here against brute-force sampling of the same route.
"""

import numpy as np

import taxisentinel as ts
from taxisentinel.airport import plan_from_nodes
from taxisentinel.traveltime import fw_compose, link_time_dist, route_cdf

graph = ts.load_graph(ts.data_path("fixtures/haneda_graph.json"))
nodes = ["Txy_C_004", "Txy_C_005", "Txy_C5_C5B", "Rwy_03_006"]
plan = plan_from_nodes(graph, nodes, callsign="JA722A")

print("route:", " -> ".join(nodes))
for link in plan.links:
    p = link.speed_params
    print(f"  {link.id:<24} {link.length:7.1f} m  class {link.speed_class.name:<8}"
          f" (mu_log {p.mu_log:+.3f}, sigma_log {p.sigma_log:.3f})")

comp = fw_compose([link_time_dist(lk.length, lk.speed_params) for lk in plan.links])
print(f"\ncomposed: mean {comp.M:.1f} s, std {comp.V ** 0.5:.1f} s "
      f"(mu* {comp.mu_star:.4f}, sigma* {comp.sigma_star:.4f})")

samples = ts.sample_route_times(plan, graph, 200_000, seed=42)
print(f"sampled : mean {samples.mean():.1f} s, std {samples.std():.1f} s  (200k draws)")

print("\nquantile comparison (analytic CDF vs sampled):")
for q in (0.05, 0.25, 0.5, 0.75, 0.95):
    t = float(np.quantile(samples, q))
    print(f"  t={t:7.1f} s  sampled {q:.2f}   analytic {route_cdf(comp, t):.3f}")
