"""Airport node-link layout: loading, speed classes, destination linking, plans.

The graph file is JSON with planar coordinates in meters (or lat/lon, which
the loader projects onto a local plane).  Every link gets a log-normal taxi
speed: either an explicit per-link override or the default for its speed
class, with class means/stds in knots converted to SI at load time.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import (
    DuplicateNodeError,
    EmptyQueryError,
    MalformedFileError,
    NoPathError,
    UnknownNodeError,
)
from .traveltime import LogNormalParams, from_physical_moments

KT_TO_MS = 0.514444
EARTH_RADIUS_M = 6371000.0
LINK_SCORE_THRESHOLD = 0.35

NATO_LETTERS = {
    "alpha": "a", "bravo": "b", "charlie": "c", "delta": "d", "echo": "e",
    "foxtrot": "f", "golf": "g", "hotel": "h", "india": "i", "juliett": "j",
    "juliet": "j", "kilo": "k", "lima": "l", "mike": "m", "november": "n",
    "oscar": "o", "papa": "p", "quebec": "q", "romeo": "r", "sierra": "s",
    "tango": "t", "uniform": "u", "victor": "v", "whiskey": "w", "xray": "x",
    "yankee": "y", "zulu": "z",
}


class NodeKind(Enum):
    RUNWAY = "RUNWAY"
    TAXIWAY = "TAXIWAY"
    TAXILANE = "TAXILANE"
    RAMP = "RAMP"
    GATE = "GATE"
    HOLD = "HOLD"


class SpeedClass(Enum):
    """Default taxi-speed assumptions (mean, std in knots) per link class."""

    RWY_RWY = (30.0, 10.0)
    RWY_TXY = (25.0, 5.0)
    TXY_TXY = (20.0, 5.0)
    OTHER = (10.0, 5.0)

    @property
    def mean_kt(self) -> float:
        return self.value[0]

    @property
    def std_kt(self) -> float:
        return self.value[1]

    def default_params(self) -> LogNormalParams:
        return from_physical_moments(self.mean_kt * KT_TO_MS, self.std_kt * KT_TO_MS)


@dataclass(frozen=True)
class Node:
    id: str
    name: str
    x: float
    y: float
    kind: NodeKind
    lat: float | None = None
    lon: float | None = None


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    length: float
    speed_class: SpeedClass
    speed_params: LogNormalParams

    @property
    def id(self) -> str:
        return f"{self.a}-{self.b}"

    def other(self, node_id: str) -> str:
        return self.b if node_id == self.a else self.a


@dataclass
class AirportGraph:
    nodes: dict[str, Node]
    links: list[Link]
    origin: tuple[float, float] | None = None  # (lat0, lon0) when loaded geodetic
    adjacency: dict[str, list[tuple[str, Link]]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.adjacency:
            adj: dict[str, list[tuple[str, Link]]] = {nid: [] for nid in self.nodes}
            for link in self.links:
                adj[link.a].append((link.b, link))
                adj[link.b].append((link.a, link))
            for nid in adj:
                adj[nid].sort(key=lambda t: t[0])
            self.adjacency = adj

    def link_between(self, a: str, b: str) -> Link | None:
        for other, link in self.adjacency.get(a, []):
            if other == b:
                return link
        return None

    @property
    def geodetic(self) -> bool:
        return any(n.lat is not None for n in self.nodes.values())


@dataclass(frozen=True)
class TaxiPlan:
    callsign: str
    nodes: list[str]
    links: list[Link]
    start_time: float

    def __post_init__(self):
        if len(self.nodes) != len(self.links) + 1:
            raise ValueError("a taxi plan needs exactly one more node than links")
        for i, link in enumerate(self.links):
            if {self.nodes[i], self.nodes[i + 1]} != {link.a, link.b}:
                raise ValueError(f"link {link.id} does not join {self.nodes[i]} and {self.nodes[i + 1]}")
            if i > 0 and link is self.links[i - 1]:
                raise ValueError("a taxi plan may not reuse a link back to back")

    @property
    def total_length(self) -> float:
        return sum(link.length for link in self.links)


def classify_link_kinds(kind_a: NodeKind, kind_b: NodeKind) -> SpeedClass:
    runway_count = (kind_a is NodeKind.RUNWAY) + (kind_b is NodeKind.RUNWAY)
    if runway_count == 2:
        return SpeedClass.RWY_RWY
    if runway_count == 1:
        return SpeedClass.RWY_TXY
    if kind_a is NodeKind.TAXIWAY and kind_b is NodeKind.TAXIWAY:
        return SpeedClass.TXY_TXY
    return SpeedClass.OTHER


def classify_link(link: Link, graph: AirportGraph) -> SpeedClass:
    return classify_link_kinds(graph.nodes[link.a].kind, graph.nodes[link.b].kind)


def load_graph(file: str | Path) -> AirportGraph:
    """Load and validate a graph JSON file; build adjacency and speed params.

    Nodes may carry planar x/y in meters or lat/lon in degrees; geodetic
    coordinates are projected with a local equirectangular approximation about
    the graph centroid (adequate at airport scale).
    """
    try:
        raw = json.loads(Path(file).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFileError(f"cannot read graph file {file}: {exc}") from exc
    if not isinstance(raw, dict) or "nodes" not in raw or "links" not in raw:
        raise MalformedFileError("graph JSON must be an object with 'nodes' and 'links'")

    node_entries = raw["nodes"]
    geodetic = bool(node_entries) and all("lat" in n and "lon" in n for n in node_entries)
    if geodetic:
        lat0 = sum(float(n["lat"]) for n in node_entries) / len(node_entries)
        lon0 = sum(float(n["lon"]) for n in node_entries) / len(node_entries)

    nodes: dict[str, Node] = {}
    for entry in node_entries:
        try:
            nid = str(entry["id"])
            kind = NodeKind[str(entry["kind"]).upper()]
            if geodetic:
                lat, lon = float(entry["lat"]), float(entry["lon"])
                x, y = project_geodetic(lat, lon, (lat0, lon0))
            else:
                lat = lon = None
                x, y = float(entry["x"]), float(entry["y"])
        except (KeyError, ValueError) as exc:
            raise MalformedFileError(f"bad node entry {entry!r}: {exc}") from exc
        if not (math.isfinite(x) and math.isfinite(y)):
            raise MalformedFileError(f"node {nid!r} has non-finite coordinates")
        if nid in nodes:
            raise DuplicateNodeError(nid)
        nodes[nid] = Node(id=nid, name=str(entry.get("name", "")), x=x, y=y, kind=kind,
                          lat=lat, lon=lon)

    links: list[Link] = []
    seen_pairs: set[frozenset[str]] = set()
    for entry in raw["links"]:
        try:
            a, b = str(entry["a"]), str(entry["b"])
        except KeyError as exc:
            raise MalformedFileError(f"bad link entry {entry!r}: missing {exc}") from exc
        for nid in (a, b):
            if nid not in nodes:
                raise UnknownNodeError(nid, f"link {a}-{b} references unknown node {nid!r}")
        if a == b:
            raise MalformedFileError(f"link {a}-{b} joins a node to itself")
        pair = frozenset((a, b))
        if pair in seen_pairs:
            raise MalformedFileError(f"duplicate link between {a} and {b}")
        seen_pairs.add(pair)
        length = entry.get("length")
        if length is None:
            na, nb = nodes[a], nodes[b]
            length = math.hypot(na.x - nb.x, na.y - nb.y)
        length = float(length)
        if length <= 0:
            raise MalformedFileError(f"link {a}-{b} has non-positive length {length}")
        if "speed_class" in entry:
            try:
                sclass = SpeedClass[str(entry["speed_class"]).upper()]
            except KeyError as exc:
                raise MalformedFileError(f"link {a}-{b}: unknown speed class {entry['speed_class']!r}") from exc
        else:
            sclass = classify_link_kinds(nodes[a].kind, nodes[b].kind)
        if "speed_mean_kt" in entry or "speed_std_kt" in entry:
            try:
                mean_kt = float(entry["speed_mean_kt"])
                std_kt = float(entry["speed_std_kt"])
            except (KeyError, ValueError) as exc:
                raise MalformedFileError(
                    f"link {a}-{b}: speed override needs both speed_mean_kt and speed_std_kt"
                ) from exc
            params = from_physical_moments(mean_kt * KT_TO_MS, std_kt * KT_TO_MS)
        else:
            params = sclass.default_params()
        links.append(Link(a=a, b=b, length=length, speed_class=sclass, speed_params=params))

    origin = (lat0, lon0) if geodetic else None
    return AirportGraph(nodes=nodes, links=links, origin=origin)


def project_geodetic(lat: float, lon: float, origin: tuple[float, float]) -> tuple[float, float]:
    """Local equirectangular projection about the graph origin (meters)."""
    lat0, lon0 = origin
    x = EARTH_RADIUS_M * math.cos(math.radians(lat0)) * math.radians(lon - lon0)
    y = EARTH_RADIUS_M * math.radians(lat - lat0)
    return x, y


def _normalize_tokens(text: str) -> list[str]:
    out = []
    for tok in "".join(c if c.isalnum() else " " for c in text.lower()).split():
        out.append(NATO_LETTERS.get(tok, tok))
    return out


def _trigrams(text: str) -> set[str]:
    s = " ".join(_normalize_tokens(text))
    return {s[i:i + 3] for i in range(len(s) - 2)} if len(s) >= 3 else set()


def _dice(a: set[str], b: set[str]) -> float:
    if not a or not b:
        return 0.0
    return 2.0 * len(a & b) / (len(a) + len(b))


def string_similarity(query: str, node: Node) -> float:
    """Default destination-linking score; an embedding scorer can replace it."""
    q_tokens = set(_normalize_tokens(query))
    if not q_tokens:
        return 0.0
    cand_tokens = set(_normalize_tokens(node.id)) | set(_normalize_tokens(node.name))
    token_score = len(q_tokens & cand_tokens) / len(q_tokens)
    q_tri = _trigrams(query)
    trigram_score = max(_dice(q_tri, _trigrams(node.id)), _dice(q_tri, _trigrams(node.name)))
    return max(token_score, trigram_score)


def link_destination(query: str, graph: AirportGraph, k: int = 5,
                     scorer=string_similarity) -> list[tuple[str, float]]:
    """Rank graph nodes against a spoken destination phrase.

    Scores in [0, 1]; results below the threshold are dropped; ties break on
    node id so results are deterministic.
    """
    if not query or not query.strip():
        raise EmptyQueryError("destination query is empty")
    scored = [(nid, scorer(query, node)) for nid, node in graph.nodes.items()]
    scored = [(nid, s) for nid, s in scored if s >= LINK_SCORE_THRESHOLD]
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def resolve_destination(graph: AirportGraph, phrase: str,
                        current_node: str | None = None) -> str | None:
    """Map a destination phrase to a node id, or None when nothing matches.

    Runway phrases resolve to the runway entry node: the runway node nearest
    to the aircraft's current position when known, else the lexicographically
    first node of that runway.  Anything else goes through string-similarity
    linking.
    """
    from .transcripts import classify_dest_runway

    runway = classify_dest_runway(phrase)
    if runway is not None:
        token = runway.lower()
        candidates = [
            n for n in graph.nodes.values()
            if n.kind is NodeKind.RUNWAY and token in _normalize_tokens(n.id + " " + n.name)
        ]
        if not candidates:
            return None
        if current_node is not None and current_node in graph.nodes:
            ref = graph.nodes[current_node]
            candidates.sort(key=lambda n: (math.hypot(n.x - ref.x, n.y - ref.y), n.id))
        else:
            candidates.sort(key=lambda n: n.id)
        return candidates[0].id
    ranked = link_destination(phrase, graph, k=1)
    return ranked[0][0] if ranked else None


def shortest_taxi_plan(graph: AirportGraph, frm: str, to: str,
                       via: list[str] | None = None, start_time: float = 0.0,
                       callsign: str = "") -> TaxiPlan:
    """Length-minimal taxi plan from -> via[0] -> ... -> to.

    Each segment is a nonnegative-weight shortest path; among equal-length
    paths the lexicographically smallest node sequence wins.
    """
    waypoints = [frm, *(via or []), to]
    for nid in waypoints:
        if nid not in graph.nodes:
            raise UnknownNodeError(nid)
    nodes = [frm]
    for a, b in zip(waypoints, waypoints[1:]):
        segment = _dijkstra(graph, a, b)
        nodes.extend(segment[1:])
    links = [graph.link_between(u, v) for u, v in zip(nodes, nodes[1:])]
    for prev, cur in zip(links, links[1:]):
        if prev is cur:
            raise NoPathError("via sequence forces an immediate link reversal")
    return TaxiPlan(callsign=callsign, nodes=nodes, links=links, start_time=start_time)


def plan_from_nodes(graph: AirportGraph, nodes: list[str], callsign: str = "",
                    start_time: float = 0.0) -> TaxiPlan:
    """Build a plan from an explicit node sequence (nodes must be adjacent)."""
    if not nodes:
        raise NoPathError("a plan needs at least one node")
    links = []
    for u, v in zip(nodes, nodes[1:]):
        if u not in graph.nodes:
            raise UnknownNodeError(u)
        if v not in graph.nodes:
            raise UnknownNodeError(v)
        link = graph.link_between(u, v)
        if link is None:
            raise NoPathError(f"nodes {u} and {v} are not joined by a link")
        links.append(link)
    return TaxiPlan(callsign=callsign, nodes=list(nodes), links=links, start_time=start_time)


def plan_overlap(p1: TaxiPlan, p2: TaxiPlan) -> list[str]:
    """Nodes common to both plans, ordered by first traversal in plan 1."""
    other = set(p2.nodes)
    seen = set()
    out = []
    for nid in p1.nodes:
        if nid in other and nid not in seen:
            out.append(nid)
            seen.add(nid)
    return out


def _dijkstra(graph: AirportGraph, source: str, target: str) -> list[str]:
    if source == target:
        return [source]
    # heap entries carry the path so equal-cost ties resolve to the
    # lexicographically smallest node sequence
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (source,))]
    done: set[str] = set()
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        if node == target:
            return list(path)
        done.add(node)
        for other, link in graph.adjacency[node]:
            if other not in done:
                heapq.heappush(heap, (dist + link.length, path + (other,)))
    raise NoPathError(f"no path from {source} to {target}")
