"""Link-speed distribution fitting and the supporting statistical tests.

The K-S statistic, ANOVA F, and Kruskal-Wallis H are computed from first
principles (the formulas are short and the tests double as documentation);
only the reference distributions (normal quantiles, F and chi-square tails)
come from scipy.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import chi2 as chi2_dist
from scipy.stats import f as f_dist

from .airport import AirportGraph
from .errors import (
    AllTiedError,
    DegenerateGroupsError,
    MalformedFileError,
    NonMonotoneTimeError,
    NonpositiveSpeedError,
    TooFewSamplesError,
    ZeroVarianceError,
)
from .traveltime import LogNormalParams

MAX_MATCH_DISTANCE_M = 50.0
DEFAULT_STATIONARY_CUTOFF = 0.5  # m/s


class WeightClass(Enum):
    SMALL = "SMALL"
    LARGE = "LARGE"
    HEAVY = "HEAVY"
    SUPER = "SUPER"


@dataclass(frozen=True)
class SpeedSample:
    link: str
    timestamp: float
    speed: float
    weight_class: WeightClass | None = None

    def __post_init__(self):
        if not (self.speed > 0 and math.isfinite(self.speed)):
            raise NonpositiveSpeedError(f"speed must be positive and finite, got {self.speed}")


@dataclass(frozen=True)
class TrackPoint:
    time: float
    callsign: str
    x: float
    y: float
    weight_class: WeightClass | None = None


@dataclass(frozen=True)
class FitReport:
    link: str
    n: int
    params: LogNormalParams
    ks_statistic: float
    ks_p_value: float


@dataclass(frozen=True)
class LognormalHypothesis:
    params: LogNormalParams

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return float(ndtr((math.log(x) - self.params.mu_log) / self.params.sigma_log))

    def ppf(self, q: float) -> float:
        return math.exp(self.params.mu_log + self.params.sigma_log * float(ndtri(q)))


@dataclass(frozen=True)
class NormalHypothesis:
    mean: float
    std: float

    def cdf(self, x: float) -> float:
        return float(ndtr((x - self.mean) / self.std))

    def ppf(self, q: float) -> float:
        return self.mean + self.std * float(ndtri(q))


def fit_lognormal(speeds: list[float]) -> LogNormalParams:
    """Maximum-likelihood log-normal fit: log-mean and population log-std."""
    if len(speeds) < 2:
        raise TooFewSamplesError(f"need at least 2 samples, got {len(speeds)}")
    if any(s <= 0 for s in speeds):
        raise NonpositiveSpeedError("all speeds must be > 0")
    logs = np.log(np.asarray(speeds, dtype=float))
    mu = float(logs.mean())
    sigma = float(logs.std(ddof=0))
    if sigma <= 0:
        raise ZeroVarianceError("all samples identical; log-normal fit is degenerate")
    return LogNormalParams(mu, sigma)


def kolmogorov_sf(lam: float) -> float:
    """Asymptotic K-S survival function 2*sum_k (-1)^(k-1) exp(-2 k^2 lam^2)."""
    if lam <= 1e-3:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 100001):
        term = math.exp(-2.0 * k * k * lam * lam)
        if term < 1e-12:
            break
        total += sign * term
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(samples: list[float], hypothesized) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test against a fully specified CDF."""
    n = len(samples)
    if n < 5:
        raise TooFewSamplesError(f"need at least 5 samples, got {n}")
    xs = np.sort(np.asarray(samples, dtype=float))
    cdf = np.array([hypothesized.cdf(float(x)) for x in xs])
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    return d, kolmogorov_sf(math.sqrt(n) * d)


def qq_points(samples: list[float], hypothesized) -> list[tuple[float, float]]:
    """(theoretical quantile, empirical quantile) pairs at (i - 0.5) / n."""
    n = len(samples)
    if n < 2:
        raise TooFewSamplesError(f"need at least 2 samples, got {n}")
    xs = sorted(float(s) for s in samples)
    return [(hypothesized.ppf((i - 0.5) / n), xs[i - 1]) for i in range(1, n + 1)]


def anova_f(groups: list[list[float]]) -> tuple[float, float]:
    """One-way ANOVA F statistic and p-value."""
    k = len(groups)
    if k < 2:
        raise TooFewSamplesError("need at least 2 groups")
    if any(len(g) < 2 for g in groups):
        raise TooFewSamplesError("each group needs at least 2 observations")
    sizes = [len(g) for g in groups]
    N = sum(sizes)
    if N < k + 1:
        raise TooFewSamplesError("need more observations than groups plus one")
    grand = sum(sum(g) for g in groups) / N
    ssb = sum(n * (sum(g) / n - grand) ** 2 for g, n in zip(groups, sizes))
    ssw = sum(sum((x - sum(g) / n) ** 2 for x in g) for g, n in zip(groups, sizes))
    if ssw == 0:
        raise DegenerateGroupsError("within-group variance is zero in every group")
    f = (ssb / (k - 1)) / (ssw / (N - k))
    p = float(f_dist.sf(f, k - 1, N - k))
    return f, p


def kruskal_wallis(groups: list[list[float]]) -> tuple[float, float]:
    """Kruskal-Wallis H with mid-rank ties and the standard tie correction."""
    k = len(groups)
    if k < 2:
        raise TooFewSamplesError("need at least 2 groups")
    if any(len(g) < 1 for g in groups):
        raise TooFewSamplesError("each group needs at least 1 observation")
    values = [x for g in groups for x in g]
    N = len(values)
    if len(set(values)) == 1:  # fully tied data is degenerate at any size
        raise AllTiedError("all observations tied; Kruskal-Wallis is undefined")
    if N < 3:
        raise TooFewSamplesError("need at least 3 observations in total")
    ranks = _midranks(values)
    correction = 1.0 - _tie_term(values) / (N ** 3 - N)
    if correction == 0:
        raise AllTiedError("all observations tied; Kruskal-Wallis is undefined")
    pos = 0
    h = 0.0
    for g in groups:
        r = ranks[pos:pos + len(g)]
        h += len(g) * (sum(r) / len(g)) ** 2
        pos += len(g)
    h = (12.0 / (N * (N + 1))) * h - 3.0 * (N + 1)
    h /= correction
    p = float(chi2_dist.sf(h, k - 1))
    return h, p


def fit_link_reports(samples: list[SpeedSample]) -> tuple[list[FitReport], list[dict]]:
    """Group samples per link, fit each, and K-S-test the fit against itself.

    Links whose samples cannot be fitted (too few, zero variance) land in the
    skip list instead of raising.  The p-values use parameters estimated from
    the same data, which biases the test optimistic; treat them as a ranking.
    """
    by_link: dict[str, list[float]] = {}
    for s in samples:
        by_link.setdefault(s.link, []).append(s.speed)
    reports: list[FitReport] = []
    skipped: list[dict] = []
    for link_id in sorted(by_link):
        speeds = by_link[link_id]
        try:
            params = fit_lognormal(speeds)
            d, p = ks_test(speeds, LognormalHypothesis(params))
        except (TooFewSamplesError, ZeroVarianceError, NonpositiveSpeedError) as exc:
            skipped.append({"link": link_id, "n": len(speeds), "reason": exc.code})
            continue
        reports.append(FitReport(link=link_id, n=len(speeds), params=params,
                                 ks_statistic=d, ks_p_value=p))
    return reports, skipped


def link_speed_extract(track: list[TrackPoint], graph: AirportGraph,
                       stationary_cutoff: float = DEFAULT_STATIONARY_CUTOFF) -> list[SpeedSample]:
    """Per-link speed samples from consecutive surface-track points.

    Each consecutive pair of points of one callsign yields a speed sample
    assigned to the link nearest the pair midpoint; stationary pairs and pairs
    more than 50 m from any link are dropped.
    """
    by_callsign: dict[str, list[TrackPoint]] = {}
    for p in track:
        by_callsign.setdefault(p.callsign, []).append(p)
    segments = [
        (graph.nodes[lk.a].x, graph.nodes[lk.a].y, graph.nodes[lk.b].x, graph.nodes[lk.b].y, lk.id)
        for lk in graph.links
    ]
    samples: list[SpeedSample] = []
    for callsign, points in by_callsign.items():
        times = [p.time for p in points]
        if any(t1 > t2 for t1, t2 in zip(times, times[1:])):
            raise NonMonotoneTimeError(f"track times for {callsign} are not non-decreasing")
        for a, b in zip(points, points[1:]):
            dt = b.time - a.time
            if dt <= 0:
                continue
            speed = math.hypot(b.x - a.x, b.y - a.y) / dt
            if speed < stationary_cutoff:
                continue
            mx, my = (a.x + b.x) / 2, (a.y + b.y) / 2
            best = None
            for x1, y1, x2, y2, link_id in segments:
                dist = _point_segment_distance(mx, my, x1, y1, x2, y2)
                if best is None or dist < best[0] or (dist == best[0] and link_id < best[1]):
                    best = (dist, link_id)
            if best is None or best[0] > MAX_MATCH_DISTANCE_M:
                continue
            samples.append(SpeedSample(link=best[1], timestamp=(a.time + b.time) / 2,
                                       speed=speed, weight_class=a.weight_class))
    return samples


def read_track_csv(path: str | Path, graph: AirportGraph | None = None) -> list[TrackPoint]:
    """Track CSV: time,callsign,x,y[,weight_class] in planar meters, or
    time,callsign,lat,lon[,weight_class] projected onto the graph's plane."""
    from .airport import project_geodetic

    points = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            fields = set(reader.fieldnames or [])
            geodetic = {"lat", "lon"} <= fields
            if geodetic and (graph is None or graph.origin is None):
                raise MalformedFileError(
                    f"track file {path} uses lat/lon but no geodetic graph was given"
                )
            for row in reader:
                wc = row.get("weight_class") or None
                if geodetic:
                    x, y = project_geodetic(float(row["lat"]), float(row["lon"]), graph.origin)
                else:
                    x, y = float(row["x"]), float(row["y"])
                points.append(TrackPoint(
                    time=float(row["time"]),
                    callsign=row["callsign"],
                    x=x,
                    y=y,
                    weight_class=WeightClass[wc.upper()] if wc else None,
                ))
    except (OSError, KeyError, ValueError) as exc:
        raise MalformedFileError(f"cannot read track file {path}: {exc}") from exc
    return points


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # ranks are 1-based
        for idx in order[i:j + 1]:
            ranks[idx] = avg
        i = j + 1
    return ranks


def _tie_term(values: list[float]) -> float:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return float(sum(t ** 3 - t for t in counts.values() if t > 1))


def _point_segment_distance(px, py, x1, y1, x2, y2) -> float:
    dx, dy = x2 - x1, y2 - y1
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        return math.hypot(px - x1, py - y1)
    t = max(0.0, min(1.0, ((px - x1) * dx + (py - y1) * dy) / seg2))
    return math.hypot(px - (x1 + t * dx), py - (y1 + t * dy))
