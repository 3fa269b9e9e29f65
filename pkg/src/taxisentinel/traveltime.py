"""Log-normal link travel times and Fenton-Wilkinson route composition.

A link speed v is log-normal with log-space parameters (mu, sigma).  The time
to cover distance d is then tau = d / v, again log-normal with parameters
(ln d - mu, sigma).  A route total is the sum of independent link times; we
approximate that sum by a single log-normal matched on its first two moments
(Fenton-Wilkinson), which keeps every downstream density evaluation in closed
form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.special import ndtr

from .errors import (
    EmptyRouteError,
    NonpositiveDistanceError,
    NonpositiveMomentError,
    NonpositiveTimeError,
)

# FW is a body approximation; beyond this the matched log-normal drifts.
FW_SIGMA_WARN = 1.0


@dataclass(frozen=True)
class LogNormalParams:
    """Log-space parameters of a log-normal quantity."""

    mu_log: float
    sigma_log: float

    def __post_init__(self):
        if not (math.isfinite(self.mu_log) and math.isfinite(self.sigma_log)):
            raise NonpositiveMomentError("log-normal parameters must be finite")
        if self.sigma_log <= 0:
            raise NonpositiveMomentError("sigma_log must be > 0")

    @property
    def mean(self) -> float:
        return math.exp(self.mu_log + self.sigma_log ** 2 / 2)

    @property
    def variance(self) -> float:
        s2 = self.sigma_log ** 2
        return math.exp(2 * self.mu_log + s2) * math.expm1(s2)


@dataclass(frozen=True)
class LinkTimeDist:
    """Travel-time distribution of one link of length d (meters)."""

    params: LogNormalParams  # time-space parameters (ln d - mu_speed, sigma_speed)
    d: float
    speed: LogNormalParams  # the underlying speed parameters

    def pdf(self, t: float) -> float:
        return _lognorm_pdf(t, self.params.mu_log, self.params.sigma_log)

    def cdf(self, t: float) -> float:
        if t <= 0:
            return 0.0
        return float(ndtr((math.log(t) - self.params.mu_log) / self.params.sigma_log))


@dataclass(frozen=True)
class RouteTimeDist:
    """Fenton-Wilkinson composed route travel-time distribution."""

    mu_star: float
    sigma_star: float
    M: float  # sum of link time means (s)
    V: float  # sum of link time variances (s^2)
    n_links: int


def from_physical_moments(mean_speed: float, std_speed: float) -> LogNormalParams:
    """Log-space parameters of the log-normal with the given physical mean/std.

    Inverts mean = exp(mu + sigma^2/2) and std = mean * sqrt(exp(sigma^2) - 1).
    """
    if mean_speed <= 0 or std_speed <= 0:
        raise NonpositiveMomentError("mean and std must both be > 0")
    cv2 = (std_speed / mean_speed) ** 2
    sigma2 = math.log1p(cv2)
    mu = math.log(mean_speed) - sigma2 / 2
    return LogNormalParams(mu, math.sqrt(sigma2))


def link_time_dist(d: float, speed: LogNormalParams) -> LinkTimeDist:
    """Travel-time distribution for distance d at the given log-normal speed."""
    if d <= 0:
        raise NonpositiveDistanceError(f"link distance must be > 0, got {d}")
    params = LogNormalParams(math.log(d) - speed.mu_log, speed.sigma_log)
    return LinkTimeDist(params=params, d=d, speed=speed)


def time_moments(t: LinkTimeDist) -> tuple[float, float]:
    """(mean, variance) of a link travel time, in s and s^2."""
    mu, sigma = t.speed.mu_log, t.speed.sigma_log
    s2 = sigma * sigma
    mean = t.d * math.exp(-mu + s2 / 2)
    var = t.d * t.d * math.exp(-2 * mu + s2) * math.expm1(s2)
    return mean, var


def fw_compose(links: list[LinkTimeDist]) -> RouteTimeDist:
    """Match a single log-normal to the first two moments of the link-time sum.

    Link independence is assumed: V is the plain sum of link variances.
    """
    if not links:
        raise EmptyRouteError("cannot compose an empty route")
    for link in links:
        if link.params.sigma_log > FW_SIGMA_WARN:
            warnings.warn(
                f"link sigma_log={link.params.sigma_log:.3f} exceeds {FW_SIGMA_WARN}; "
                "Fenton-Wilkinson accuracy degrades beyond moderate variance",
                RuntimeWarning,
                stacklevel=2,
            )
    M = 0.0
    V = 0.0
    for link in links:
        mean, var = time_moments(link)
        M += mean
        V += var
    sigma2 = math.log1p(V / (M * M))
    mu_star = math.log(M) - sigma2 / 2
    return RouteTimeDist(mu_star=mu_star, sigma_star=math.sqrt(sigma2), M=M, V=V, n_links=len(links))


def route_pdf(r: RouteTimeDist, t: float) -> float:
    """Density of the composed route time at t > 0."""
    if t <= 0:
        raise NonpositiveTimeError(f"time must be > 0, got {t}")
    return _lognorm_pdf(t, r.mu_star, r.sigma_star)


def route_cdf(r: RouteTimeDist, t: float) -> float:
    """P(route time <= t) for t > 0."""
    if t <= 0:
        raise NonpositiveTimeError(f"time must be > 0, got {t}")
    return float(ndtr((math.log(t) - r.mu_star) / r.sigma_star))


def _lognorm_pdf(t: float, mu: float, sigma: float) -> float:
    if t <= 0:
        return 0.0
    z = (math.log(t) - mu) / sigma
    return math.exp(-z * z / 2) / (t * sigma * math.sqrt(2 * math.pi))
