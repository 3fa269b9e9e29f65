"""Collision probability at a shared node from two route travel-time laws.

The probability that two aircraft occupy the same node neighbourhood is
approximated by

    P = 2 * r_c * E[1/v] * f_D(0)

where f_D(0) is the density at zero of the arrival-time difference of the two
aircraft (the temporal overlap of the two route-time densities) and E[1/v] is
the expected inverse speed of the trailing aircraft on the link by which it
enters the node.  With both route times Fenton-Wilkinson log-normals and equal
start offsets, the overlap integral has a closed form; staggered starts fall
back to adaptive quadrature on the log-time axis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .errors import NegativeOffsetError
from .traveltime import LogNormalParams, RouteTimeDist, fw_compose, link_time_dist

# integration window half-width in units of sigma on the log-time axis
_SPAN = 13.0


@dataclass(frozen=True)
class CollisionSpot:
    node: str
    r_c: float  # collision radius, meters

    def __post_init__(self):
        if self.r_c <= 0:
            raise ValueError(f"collision radius must be > 0, got {self.r_c}")


@dataclass(frozen=True)
class RiskScore:
    node: str
    overlap_density: float  # f_D(0), 1/s
    inv_speed_expectation: float  # E[1/v], s/m
    probability: float
    clamped: bool


def expected_inverse_speed(speed: LogNormalParams) -> float:
    """E[1/v] for a log-normal speed; 1/v is log-normal with negated mu."""
    return math.exp(-speed.mu_log + speed.sigma_log ** 2 / 2)


def overlap_density(
    r1: RouteTimeDist,
    r2: RouteTimeDist,
    offset1: float = 0.0,
    offset2: float = 0.0,
) -> float:
    """Density at zero of the arrival-time difference, integral of f1*f2.

    Equal offsets use the closed form (the offset shifts both factors alike and
    cancels); staggered offsets are integrated numerically.
    """
    if offset1 < 0 or offset2 < 0:
        raise NegativeOffsetError("start-time offsets must be >= 0")
    if offset1 == offset2:
        return _overlap_closed_form(r1.mu_star, r1.sigma_star, r2.mu_star, r2.sigma_star)
    return overlap_density_quadrature(r1, r2, offset1, offset2)


def overlap_density_quadrature(
    r1: RouteTimeDist,
    r2: RouteTimeDist,
    offset1: float = 0.0,
    offset2: float = 0.0,
) -> float:
    """Numerical evaluation of the overlap integral (any offsets).

    The integrand is rescaled by its peak value before quadrature so the
    result keeps full relative precision even when the overlap is tiny.
    """
    if offset1 < 0 or offset2 < 0:
        raise NegativeOffsetError("start-time offsets must be >= 0")
    m1, s1 = r1.mu_star, r1.sigma_star
    m2, s2 = r2.mu_star, r2.sigma_star
    if offset1 == offset2:
        return _integrate_scaled(*_equal_offset_integrand(m1, s1, m2, s2))
    # order so the shifted factor has the smaller offset: with delta >= 0 the
    # substitution s = t - offset_late keeps both arguments positive
    if offset1 > offset2:
        m1, s1, m2, s2 = m2, s2, m1, s1
        offset1, offset2 = offset2, offset1
    delta = offset2 - offset1
    return _integrate_scaled(*_shifted_integrand(m1, s1, m2, s2, delta))


def collision_probability(
    r1: RouteTimeDist,
    r2: RouteTimeDist,
    spot: CollisionSpot,
    trailing_link_speed: LogNormalParams,
    offset1: float = 0.0,
    offset2: float = 0.0,
    trailing_link_length: float | None = None,
) -> RiskScore:
    """Compact collision probability at a shared node, clamped to [0, 1]."""
    if trailing_link_length is not None and spot.r_c > 0.5 * trailing_link_length:
        warnings.warn(
            f"collision radius {spot.r_c} m is large relative to the trailing "
            f"link length {trailing_link_length} m; the point-mass approximation degrades",
            RuntimeWarning,
            stacklevel=2,
        )
    density = overlap_density(r1, r2, offset1, offset2)
    e_inv = expected_inverse_speed(trailing_link_speed)
    raw = 2.0 * spot.r_c * e_inv * density
    clamped = raw > 1.0
    return RiskScore(
        node=spot.node,
        overlap_density=density,
        inv_speed_expectation=e_inv,
        probability=min(1.0, raw),
        clamped=clamped,
    )


def risk_map(p1, p2, graph, r_c: float, offset1: float = 0.0, offset2: float = 0.0) -> list[RiskScore]:
    """One RiskScore per node shared by both taxi plans, in plan-1 order.

    Route times are the FW compositions of each plan's link prefix up to the
    node; E[1/v] comes from the link by which the later-arriving aircraft
    (larger start offset + mean route time) enters the node.  Shared nodes at
    which a plan starts have no arrival-time density and are skipped.
    """
    from .airport import plan_overlap  # local import to avoid a module cycle

    scores = []
    for node in plan_overlap(p1, p2):
        i1 = p1.nodes.index(node)
        i2 = p2.nodes.index(node)
        if i1 == 0 or i2 == 0:
            warnings.warn(
                f"shared node {node} is a plan start; no arrival-time density, skipping",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        pre1 = p1.links[:i1]
        pre2 = p2.links[:i2]
        d1 = fw_compose([link_time_dist(lk.length, lk.speed_params) for lk in pre1])
        d2 = fw_compose([link_time_dist(lk.length, lk.speed_params) for lk in pre2])
        if offset2 + d2.M >= offset1 + d1.M:
            trailing = pre2[-1]
        else:
            trailing = pre1[-1]
        scores.append(
            collision_probability(
                d1,
                d2,
                CollisionSpot(node=node, r_c=r_c),
                trailing.speed_params,
                offset1,
                offset2,
                trailing_link_length=trailing.length,
            )
        )
    return scores


def _overlap_closed_form(m1: float, s1: float, m2: float, s2: float) -> float:
    # substitute u = ln t in the product of the two log-normal pdfs and
    # complete the square; the remaining Gaussian integral is exact
    a = 1.0 / s1 ** 2 + 1.0 / s2 ** 2
    b = m1 / s1 ** 2 + m2 / s2 ** 2 - 1.0
    c = m1 ** 2 / s1 ** 2 + m2 ** 2 / s2 ** 2
    exponent = (b * b / a - c) / 2.0
    if exponent < -745.0:  # exp underflows to 0
        return 0.0
    return math.exp(exponent) / (s1 * s2 * math.sqrt(2.0 * math.pi * a))


def _equal_offset_integrand(m1, s1, m2, s2):
    log_norm = math.log(2.0 * math.pi * s1 * s2)

    def log_g(u):
        return -u - (u - m1) ** 2 / (2 * s1 ** 2) - (u - m2) ** 2 / (2 * s2 ** 2) - log_norm

    lo = min(m1, m2) - _SPAN * max(s1, s2)
    hi = max(m1, m2) + _SPAN * max(s1, s2)
    return log_g, lo, hi, None


def _shifted_integrand(m1, s1, m2, s2, delta):
    # integral of f1(s + delta) * f2(s) ds on u = ln s
    log_n1 = math.log(s1 * math.sqrt(2 * math.pi))
    log_n2 = math.log(s2 * math.sqrt(2 * math.pi))

    def log_g(u):
        x = math.exp(u) + delta
        log_f1 = -math.log(x) - log_n1 - (math.log(x) - m1) ** 2 / (2 * s1 ** 2)
        return log_f1 - (u - m2) ** 2 / (2 * s2 ** 2) - log_n2

    lo = m2 - _SPAN * s2
    hi = m2 + _SPAN * s2
    point = None
    s_mode1 = math.exp(m1) - delta  # where the shifted factor peaks, if reachable
    if s_mode1 > 0:
        u_mode1 = math.log(s_mode1)
        lo = min(lo, u_mode1 - _SPAN * s1)
        if lo < u_mode1 < hi:
            point = u_mode1
    return log_g, lo, hi, point


def _integrate_scaled(log_g, lo, hi, interior_point):
    # peak-rescaled adaptive quadrature: integrate exp(log_g - L) with L the
    # max of log_g, preserving relative accuracy at any magnitude
    res = minimize_scalar(lambda u: -log_g(u), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    peak_u = float(res.x)
    candidates = [peak_u, lo, hi] + ([interior_point] if interior_point is not None else [])
    peak_u = max(candidates, key=log_g)
    L = log_g(peak_u)
    if L == -math.inf or L < -745.0:
        return 0.0
    points = sorted({p for p in (peak_u, interior_point) if p is not None and lo < p < hi})
    val, _ = quad(
        lambda u: math.exp(log_g(u) - L),
        lo,
        hi,
        epsabs=1e-14,
        epsrel=1e-11,
        limit=400,
        points=points or None,
    )
    return val * math.exp(L)
