"""Facet enumeration, membership and vertex detection for ball polytopes.

The hull of a sample ``X`` at radius ``r`` is the intersection of every
closed radius-r ball containing ``X``.  Its combinatorics are driven by
the *center body* ``C = \\bigcap_i B(x_i, r)``: facet supporting-ball
centers are the points of ``C`` with d active sphere constraints, and a
query ``z`` belongs to the hull iff ``C`` fits inside ``B(z, r)``, i.e.
the farthest point of ``C`` from ``z`` is within ``r``.

Two enumeration modes are provided.  ``ORACLE`` scans every d-tuple of
the sample and checks each supporting-ball candidate against all other
points (cost O(n^(d+1))).  ``HULL_FILTERED`` restricts tuples to the
Euclidean convex-hull vertices of the sample, which is sound because a
point lying on the boundary of a ball that contains the whole sample is
a Euclidean extreme point.  The two modes must produce identical facet
sets on generic input; the test suite enforces this.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import kernels
from .bodies import Body, contains_batch, sample_uniform, volume
from .errors import DegeneracyError, DomainError, InfeasibleError
from .geom import radius_r_centers

logger = logging.getLogger(__name__)

# Sphere-contact comparisons on unit-scale data. Boundary ties within the
# band are resolved toward non-facet / non-vertex and logged.
SLACK = 1e-9

ORACLE = "oracle"
HULL_FILTERED = "hull-filtered"

SIDE_MINUS = "minus"
SIDE_PLUS = "plus"
_SIDES = (SIDE_MINUS, SIDE_PLUS)


@dataclass(frozen=True)
class SampleInstance:
    """An immutable point sample inside a body, with its hull radius."""

    points: np.ndarray
    body: Body
    r: float
    seed: int = 0

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != self.body.d:
            raise DomainError("points must be an (n, d) array matching the body")
        if len(pts) < 1:
            raise DomainError("a sample needs at least one point")
        if self.r <= 0:
            raise DomainError(f"radius must be positive, got {self.r}")
        if not contains_batch(self.body, pts).all():
            raise DomainError("every sample point must lie in the body")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class FacetRecord:
    """A facet witness: the index tuple, its side tag and the ball center."""

    indices: tuple[int, ...]
    side: str
    support_center: np.ndarray

    def sort_key(self):
        return (self.indices, self.side)


@dataclass(frozen=True)
class HullSummary:
    facet_count: int
    vertex_indices: frozenset[int]
    facets: tuple[FacetRecord, ...]


def hull_vertex_indices(points: np.ndarray) -> np.ndarray:
    """Euclidean convex-hull vertex indices (all indices on degenerate input)."""
    n, d = points.shape
    if n <= d:
        return np.arange(n, dtype=np.int64)
    try:
        return np.sort(ConvexHull(points).vertices).astype(np.int64)
    except QhullError:
        return np.arange(n, dtype=np.int64)


def second_layer_indices(points: np.ndarray, hull_idx: np.ndarray) -> np.ndarray:
    """Hull vertices of the sample with its first hull layer removed.

    Removing one extreme point can expose second-layer points as new hull
    vertices, so vertex tests must include them in the constraint set.
    """
    rest = np.setdiff1d(np.arange(len(points), dtype=np.int64), hull_idx)
    if len(rest) == 0:
        return rest
    return rest[hull_vertex_indices(points[rest])]


def facet_sides(tuple_indices, sample: SampleInstance):
    """How many facets the given d-tuple supports, with their records.

    Returns ``(count, records)`` where count is 0 when the tuple is not in
    hyperconvex position, and otherwise counts the supporting-ball centers
    whose complementary cap holds no other sample point (possibly both).
    """
    idx = tuple(int(i) for i in tuple_indices)
    if len(set(idx)) != sample.d or not all(0 <= i < sample.n for i in idx):
        raise DomainError(f"need {sample.d} distinct in-range indices, got {idx}")
    centers = radius_r_centers(sample.points[list(idx)], sample.r)
    if centers is None:
        return 0, []
    others = np.ones(sample.n, dtype=bool)
    others[list(idx)] = False
    rest = sample.points[others]
    records = []
    thr = sample.r + SLACK
    for side, center in zip(_SIDES, centers):
        if len(rest) == 0 or (np.linalg.norm(rest - center, axis=1) <= thr).all():
            records.append(
                FacetRecord(indices=tuple(sorted(idx)), side=side, support_center=center)
            )
    return len(records), records


def _scan(points_subset: np.ndarray, r: float, n_free: int | None = None):
    return kernels.scan_tuples(points_subset, r, SLACK, n_free)


def _edge_pairs_for(d, tuple_idx, tuple_sel, probe_pairs, probe_sel):
    """Deduplicated pair-circle index list from selected scan/probe records."""
    if d != 3:
        return None
    chunks = []
    trips = tuple_idx[tuple_sel]
    if len(trips):
        chunks.append(trips[:, [0, 1]])
        chunks.append(trips[:, [0, 2]])
        chunks.append(trips[:, [1, 2]])
    if probe_pairs is not None and len(probe_pairs):
        chunks.append(probe_pairs[probe_sel])
    if not chunks:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(np.concatenate(chunks), axis=0)


def _facets_from_scan(scan, local_to_sample, hull_local_count):
    """Feasible scan records whose members are all first-layer hull vertices."""
    idx, side, cen, viol = scan
    records = []
    for row in range(len(idx)):
        if viol[row] != -1:
            continue
        if (idx[row] >= hull_local_count).any():
            continue
        indices = tuple(sorted(int(local_to_sample[t]) for t in idx[row]))
        records.append(
            FacetRecord(indices=indices, side=_SIDES[side[row]], support_center=cen[row].copy())
        )
    records.sort(key=FacetRecord.sort_key)
    return records


def _oracle_facets(sample: SampleInstance):
    records = []
    for combo in itertools.combinations(range(sample.n), sample.d):
        try:
            _, recs = facet_sides(combo, sample)
        except DegeneracyError:
            continue
        records.extend(recs)
    records.sort(key=FacetRecord.sort_key)
    return records


def _vertex_flags(sample: SampleInstance, hull_idx, layer2_idx, scan):
    """Exact extreme-point test for each first-layer hull vertex.

    Index i is a vertex iff the farthest point of the center body of the
    sample *without* x_i lies strictly beyond r + slack from x_i.  The
    constraint set hull+layer2 covers every extreme point of any
    one-point-deleted sample.
    """
    joint = np.concatenate([hull_idx, layer2_idx])
    pts = sample.points[joint]
    idx, _, cen, viol = scan
    if sample.d == 3:
        probe_pairs, probe_viol = kernels.pair_probe(
            pts, sample.r, SLACK, len(hull_idx)
        )
    else:
        probe_pairs, probe_viol = None, None
    thr = sample.r + SLACK
    flags = np.zeros(len(hull_idx), dtype=bool)
    for local_i in range(len(hull_idx)):
        usable = (viol == -1) | (viol == local_i)
        cand = cen[usable]
        edges = _edge_pairs_for(
            sample.d,
            idx,
            usable,
            probe_pairs,
            None if probe_viol is None else (probe_viol == -1) | (probe_viol == local_i),
        )
        dist, _, feas = kernels.max_dist_query(
            pts, sample.r, SLACK, pts[local_i], local_i, cand, edges
        )
        if feas == 0:
            raise InfeasibleError("center body is empty; no radius-r ball encloses the sample")
        if dist > thr:
            flags[local_i] = True
        elif dist > sample.r - SLACK:
            logger.info(
                "boundary tie at index %d resolved to non-vertex (dist=%.12g, seed=%d)",
                int(hull_idx[local_i]), dist, sample.seed,
            )
    return flags


def count_vertices(sample: SampleInstance) -> frozenset[int]:
    """Sample indices that are extreme points of the ball hull."""
    if sample.n < 2:
        raise DomainError("vertex detection needs at least two points")
    hull_idx = hull_vertex_indices(sample.points)
    layer2 = second_layer_indices(sample.points, hull_idx)
    joint = np.concatenate([hull_idx, layer2])
    scan = _scan(sample.points[joint], sample.r, len(hull_idx))
    flags = _vertex_flags(sample, hull_idx, layer2, scan)
    return frozenset(int(i) for i in hull_idx[flags])


def enumerate_facets(sample: SampleInstance, mode: str = HULL_FILTERED) -> HullSummary:
    """Facets of the ball polytope plus its vertex index set."""
    if sample.n < sample.d:
        raise DomainError(f"need at least d={sample.d} points, got {sample.n}")
    if mode not in (ORACLE, HULL_FILTERED):
        raise DomainError(f"unknown mode {mode!r}")
    hull_idx = hull_vertex_indices(sample.points)
    layer2 = second_layer_indices(sample.points, hull_idx)
    joint = np.concatenate([hull_idx, layer2])
    scan = _scan(sample.points[joint], sample.r, len(hull_idx))
    if mode == ORACLE:
        records = _oracle_facets(sample)
    else:
        records = _facets_from_scan(scan, joint, len(hull_idx))
    if sample.n >= 2:
        flags = _vertex_flags(sample, hull_idx, layer2, scan)
        vertices = frozenset(int(i) for i in hull_idx[flags])
    else:
        vertices = frozenset()
    return HullSummary(
        facet_count=len(records), vertex_indices=vertices, facets=tuple(records)
    )


def _membership_context(sample: SampleInstance):
    """Constraint points, feasible locus centers and edge pairs for queries."""
    hull_idx = hull_vertex_indices(sample.points)
    pts = sample.points[hull_idx]
    idx, _, cen, viol = _scan(pts, sample.r, 0)
    if sample.d == 3:
        probe_pairs, _ = kernels.pair_probe(pts, sample.r, SLACK, 0)
        edges = _edge_pairs_for(3, idx, slice(None), probe_pairs, slice(None))
    else:
        edges = None
    return pts, cen, edges


def farthest_in_center_body(z, sample: SampleInstance):
    """Maximize |p - z| over the center body by exact candidate enumeration.

    Returns ``(p_star, dist)``.  Raises :class:`InfeasibleError` when no
    radius-r ball contains the whole sample.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (sample.d,):
        raise DomainError("query point dimension does not match the sample")
    pts, cand, edges = _membership_context(sample)
    dist, p_star, feas = kernels.max_dist_query(pts, sample.r, SLACK, z, -1, cand, edges)
    if feas == 0:
        raise InfeasibleError("center body is empty; no radius-r ball encloses the sample")
    return p_star, float(dist)


def hull_contains(z, sample: SampleInstance) -> bool:
    """Whether z lies in every radius-r ball containing the sample."""
    _, dist = farthest_in_center_body(z, sample)
    return dist <= sample.r + SLACK


def hull_contains_batch(queries: np.ndarray, sample: SampleInstance) -> np.ndarray:
    """Vectorized :func:`hull_contains` over an (m, d) query array."""
    pts, cand, edges = _membership_context(sample)
    probe = sample.body.center
    _, _, feas = kernels.max_dist_query(pts, sample.r, SLACK, probe, -1, cand, edges)
    if feas == 0:
        raise InfeasibleError("center body is empty; no radius-r ball encloses the sample")
    flags = kernels.hull_contains_batch(pts, sample.r, SLACK, queries, cand, edges)
    return flags.astype(bool)


def estimate_missed_fraction(
    sample: SampleInstance, rng: np.random.Generator, m: int
) -> tuple[float, float]:
    """Fraction of the body volume missed by the hull, with binomial stderr.

    Draws m fresh uniform points from the body; the missed volume estimate
    is ``fraction * volume(body)``.
    """
    if m < 1:
        raise DomainError(f"sample size must be at least 1, got {m}")
    queries = sample_uniform(sample.body, rng, m)
    inside = hull_contains_batch(queries, sample)
    fraction = float(1.0 - inside.mean())
    stderr = float(np.sqrt(fraction * (1.0 - fraction) / m))
    return fraction, stderr


def missed_volume(sample: SampleInstance, rng: np.random.Generator, m: int):
    """Monte Carlo missed volume ``V(K \\ hull)`` and its standard error."""
    fraction, stderr = estimate_missed_fraction(sample, rng, m)
    vol = volume(sample.body)
    return fraction * vol, stderr * vol
