"""Hyperconvex test bodies: balls and axis-aligned ellipsoids.

A :class:`Body` supplies exact membership, exact volume, uniform rejection
sampling and the extreme radii of curvature that gate experiment
eligibility (a body slides freely in a radius-R ball iff every radius of
curvature is at most R, and the extreme radii of an ellipsoid with
semi-axes a are a_max^2/a_min and a_min^2/a_max).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geom import unit_ball_constants

BALL = "ball"
ELLIPSOID = "ellipsoid"


@dataclass(frozen=True)
class RadiiSummary:
    """Extreme radii of curvature of a body's boundary.

    ``sliding_R`` is the smallest R such that the body slides freely in a
    radius-R ball; ``rolling_rho`` the largest radius of a ball rolling
    freely inside it.
    """

    sliding_R: float
    rolling_rho: float


@dataclass(frozen=True)
class Body:
    kind: str
    center: np.ndarray
    semi_axes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "semi_axes", np.asarray(self.semi_axes, dtype=float))
        if self.kind not in (BALL, ELLIPSOID):
            raise DomainError(f"unknown body kind {self.kind!r}")
        if self.center.ndim != 1 or self.center.shape != self.semi_axes.shape:
            raise DomainError("center and semi_axes must be vectors of equal length")
        if self.d not in (2, 3):
            raise DomainError(f"bodies are supported in d in {{2, 3}}, got {self.d}")
        if not ((self.semi_axes > 0).all() and (self.semi_axes <= 1).all()):
            raise DomainError("semi-axes must lie in (0, 1]")
        if self.kind == BALL and np.ptp(self.semi_axes) != 0:
            raise DomainError("a ball must have all semi-axes equal")

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def sliding_R(self) -> float:
        axes = self.semi_axes
        return float(axes.max() ** 2 / axes.min())

    @property
    def rolling_rho(self) -> float:
        axes = self.semi_axes
        return float(axes.min() ** 2 / axes.max())


def ball(radius: float, d: int, center=None) -> Body:
    if center is None:
        center = np.zeros(d)
    return Body(kind=BALL, center=center, semi_axes=np.full(d, float(radius)))


def ellipsoid(semi_axes, center=None) -> Body:
    semi_axes = np.asarray(semi_axes, dtype=float)
    if center is None:
        center = np.zeros(len(semi_axes))
    return Body(kind=ELLIPSOID, center=center, semi_axes=semi_axes)


def contains(body: Body, z) -> bool:
    """Closed membership test: sum(((z - c) / a)^2) <= 1."""
    z = np.asarray(z, dtype=float)
    if z.shape != body.center.shape:
        raise DomainError("point dimension does not match the body")
    return bool((((z - body.center) / body.semi_axes) ** 2).sum() <= 1.0)


def contains_batch(body: Body, pts: np.ndarray) -> np.ndarray:
    """Vectorized membership for an (m, d) array of points."""
    scaled = (pts - body.center) / body.semi_axes
    return (scaled**2).sum(axis=1) <= 1.0


def volume(body: Body) -> float:
    """Exact volume kappa_d * prod(semi_axes)."""
    return unit_ball_constants(body.d).kappa * float(np.prod(body.semi_axes))


def sample_uniform(body: Body, rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` i.i.d. uniform points in the body by rejection from its box.

    Deterministic for a fixed generator state: proposal batches are always
    drawn as blocks of twice the outstanding demand (plus padding).
    """
    if count < 0:
        raise DomainError(f"count must be nonnegative, got {count}")
    d = body.d
    out = np.empty((count, d))
    have = 0
    while have < count:
        block = 2 * (count - have) + 16
        cand = rng.uniform(-1.0, 1.0, size=(block, d))
        keep = cand[(cand**2).sum(axis=1) <= 1.0]
        take = min(len(keep), count - have)
        out[have : have + take] = keep[:take]
        have += take
    return body.center + out * body.semi_axes


def radii_summary(body: Body) -> RadiiSummary:
    """Extreme radii of curvature: (a_max^2/a_min, a_min^2/a_max)."""
    return RadiiSummary(sliding_R=body.sliding_R, rolling_rho=body.rolling_rho)


def cap_volume_mc(
    body: Body, ball_center, r: float, rng: np.random.Generator, m: int
) -> tuple[float, float]:
    """Monte Carlo volume of the part of the body outside B(ball_center, r).

    Samples m uniform points in the body and counts those outside the ball;
    the standard error comes from the binomial variance.
    """
    if m < 1:
        raise DomainError(f"sample size must be at least 1, got {m}")
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    ball_center = np.asarray(ball_center, dtype=float)
    pts = sample_uniform(body, rng, m)
    outside = ((pts - ball_center) ** 2).sum(axis=1) > r * r
    frac = float(outside.mean())
    vol = volume(body)
    stderr = vol * float(np.sqrt(frac * (1.0 - frac) / m))
    return vol * frac, stderr
