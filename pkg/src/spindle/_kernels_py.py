"""Pure numpy fallback for the hot enumeration kernels.

Same contracts as the compiled extension ``spindle._kernels``:

* ``scan_tuples(pts, r, slack, n_free)`` enumerates every d-tuple of the
  given points, builds the two radius-r supporting-sphere centers of each
  tuple in hyperconvex position, and emits one record per (tuple, side)
  whose center has at most one point of ``pts[:n_free]`` outside the
  closed ball of radius ``r + slack`` and none of ``pts[n_free:]``.
  Records carry the violating index, or -1 when the center is feasible
  for every point (a facet witness).
* ``pair_probe(pts, r, slack, n_free)`` classifies one deterministic
  point per pair circle (d=3) under the same rule, so circles carrying a
  whole feasible edge are discovered even without tuple locus points.
* ``max_dist_query(pts, r, slack, z, exclude, cand, edge_pairs)``
  maximizes |p - z| over the center body of ``pts`` minus ``exclude`` by
  exact candidate enumeration: the supplied size-d candidate points plus
  the critical points of the distance on every lower face.
* ``hull_contains_batch(pts, r, slack, queries, cand, edge_pairs)``
  batch membership: a query is outside as soon as any feasible candidate
  center is farther than ``r + slack``.

The scans assume generic input: exactly degenerate tuples are skipped.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

# Tolerances shared with geom.radius_r_centers / the compiled kernels.
POSITION_TOL = 1e-12  # relative slack on circumradius <= r
GRAM_TOL = 1e-12  # normalized Gram determinant cutoff
_CHUNK = 32768


def _empty_scan(d):
    return (
        np.empty((0, d), dtype=np.int64),
        np.empty(0, dtype=np.int8),
        np.empty((0, d), dtype=np.float64),
        np.empty(0, dtype=np.int64),
    )


def _classify_centers(centers, pts, r, slack, n_free):
    """(keep flag, violator index) per candidate center.

    Keeps centers with no violation anywhere, or exactly one violation
    inside the leading ``n_free`` block.
    """
    thr2 = (r + slack) ** 2
    keep = np.zeros(len(centers), dtype=bool)
    viol = np.full(len(centers), -1, dtype=np.int64)
    for start in range(0, len(centers), _CHUNK):
        block = centers[start : start + _CHUNK]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        bad = d2 > thr2
        strict_ok = ~bad[:, n_free:].any(axis=1)
        free_counts = bad[:, :n_free].sum(axis=1)
        k = strict_ok & (free_counts <= 1)
        keep[start : start + _CHUNK] = k
        ones = k & (free_counts == 1)
        if ones.any():
            rows = np.flatnonzero(ones)
            viol[start + rows] = bad[rows, :n_free].argmax(axis=1)
    return keep, viol


def _lex_flip_2d(normals):
    flip = (normals[:, 0] < 0) | ((normals[:, 0] == 0) & (normals[:, 1] < 0))
    normals[flip] *= -1.0
    return normals


def _lex_flip_3d(normals):
    nx, ny, nz = normals[:, 0], normals[:, 1], normals[:, 2]
    flip = (nx < 0) | ((nx == 0) & ((ny < 0) | ((ny == 0) & (nz < 0))))
    normals[flip] *= -1.0
    return normals


def _scan_2d(pts, r, slack, n_free):
    m = len(pts)
    if m < 2:
        return _empty_scan(2)
    ii, jj = np.triu_indices(m, 1)
    a, b = pts[ii], pts[jj]
    v = b - a
    vv = (v**2).sum(axis=1)
    rho2 = 0.25 * vv
    rmax2 = (r * (1.0 + POSITION_TOL)) ** 2
    ok = (rho2 <= rmax2) & (vv > 0)
    if not ok.any():
        return _empty_scan(2)
    ii, jj, v, rho2 = ii[ok], jj[ok], v[ok], rho2[ok]
    mid = 0.5 * (pts[ii] + pts[jj])
    normals = _lex_flip_2d(np.stack([-v[:, 1], v[:, 0]], axis=1))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    height = np.sqrt(np.maximum(r * r - rho2, 0.0))[:, None]
    out_idx, out_side, out_cen, out_viol = [], [], [], []
    for side, sign in ((0, -1.0), (1, 1.0)):
        centers = mid + sign * height * normals
        keep, viol = _classify_centers(centers, pts, r, slack, n_free)
        out_idx.append(np.stack([ii[keep], jj[keep]], axis=1))
        out_side.append(np.full(int(keep.sum()), side, dtype=np.int8))
        out_cen.append(centers[keep])
        out_viol.append(viol[keep])
    return (
        np.concatenate(out_idx).astype(np.int64),
        np.concatenate(out_side),
        np.concatenate(out_cen),
        np.concatenate(out_viol),
    )


def _scan_3d(pts, r, slack, n_free):
    m = len(pts)
    if m < 3:
        return _empty_scan(3)
    rmax2 = (r * (1.0 + POSITION_TOL)) ** 2
    out_idx, out_side, out_cen, out_viol = [], [], [], []
    for i in range(m - 2):
        rest = m - i - 1
        jj, kk = np.triu_indices(rest, 1)
        jj = jj + i + 1
        kk = kk + i + 1
        a = pts[i]
        v1 = pts[jj] - a
        v2 = pts[kk] - a
        g11 = (v1 * v1).sum(axis=1)
        g12 = (v1 * v2).sum(axis=1)
        g22 = (v2 * v2).sum(axis=1)
        det = g11 * g22 - g12 * g12
        ok = det > GRAM_TOL * g11 * g22
        if not ok.any():
            continue
        jj, kk, v1, v2 = jj[ok], kk[ok], v1[ok], v2[ok]
        g11, g12, g22, det = g11[ok], g12[ok], g22[ok], det[ok]
        alpha = g22 * (g11 - g12) / (2.0 * det)
        beta = g11 * (g22 - g12) / (2.0 * det)
        centers0 = a + alpha[:, None] * v1 + beta[:, None] * v2
        rho2 = ((centers0 - a) ** 2).sum(axis=1)
        ok = rho2 <= rmax2
        if not ok.any():
            continue
        jj, kk, v1, v2, centers0, rho2 = (
            jj[ok],
            kk[ok],
            v1[ok],
            v2[ok],
            centers0[ok],
            rho2[ok],
        )
        normals = _lex_flip_3d(np.cross(v1, v2))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        height = np.sqrt(np.maximum(r * r - rho2, 0.0))[:, None]
        for side, sign in ((0, -1.0), (1, 1.0)):
            centers = centers0 + sign * height * normals
            keep, viol = _classify_centers(centers, pts, r, slack, n_free)
            kept = int(keep.sum())
            if kept == 0:
                continue
            trip = np.stack([np.full(kept, i), jj[keep], kk[keep]], axis=1)
            out_idx.append(trip)
            out_side.append(np.full(kept, side, dtype=np.int8))
            out_cen.append(centers[keep])
            out_viol.append(viol[keep])
    if not out_idx:
        return _empty_scan(3)
    return (
        np.concatenate(out_idx).astype(np.int64),
        np.concatenate(out_side),
        np.concatenate(out_cen),
        np.concatenate(out_viol),
    )


def scan_tuples(pts, r, slack, n_free=None):
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    n_free = len(pts) if n_free is None else int(n_free)
    if not 0 <= n_free <= len(pts):
        raise DomainError("n_free out of range")
    d = pts.shape[1]
    if d == 2:
        return _scan_2d(pts, r, slack, n_free)
    if d == 3:
        return _scan_3d(pts, r, slack, n_free)
    raise DomainError(f"tuple scans support d in {{2, 3}}, got {d}")


def _perp_basis(axis):
    """Any unit vector orthogonal to a unit 3-vector (deterministic)."""
    helper = (
        np.array([1.0, 0.0, 0.0]) if abs(axis[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    )
    w = helper - (helper @ axis) * axis
    return w / np.linalg.norm(w)


def _pair_frames(pts, r, ii, jj):
    """(valid mask, mid, axis, circle radius) for pair circles."""
    a = pts[ii]
    v = pts[jj] - a
    vv = (v**2).sum(axis=1)
    rho2 = 0.25 * vv
    ok = (rho2 <= (r * (1.0 + POSITION_TOL)) ** 2) & (vv > 0)
    mid = a + 0.5 * v
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = v / np.sqrt(vv)[:, None]
    circ_r = np.sqrt(np.maximum(r * r - rho2, 0.0))
    return ok, mid, axis, circ_r


def pair_probe(pts, r, slack, n_free=None):
    """One deterministic probe point per in-position pair circle (d = 3)."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if pts.shape[1] != 3:
        raise DomainError("pair probes are a d=3 construction")
    n_free = len(pts) if n_free is None else int(n_free)
    m = len(pts)
    if m < 2:
        return np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.int64)
    ii, jj = np.triu_indices(m, 1)
    ok, mid, axis, circ_r = _pair_frames(pts, r, ii, jj)
    ii, jj, mid, axis, circ_r = ii[ok], jj[ok], mid[ok], axis[ok], circ_r[ok]
    probes = mid + circ_r[:, None] * np.array([_perp_basis(ax) for ax in axis]).reshape(
        -1, 3
    )
    keep, viol = _classify_centers(probes, pts, r, slack, n_free)
    pairs = np.stack([ii[keep], jj[keep]], axis=1).astype(np.int64)
    return pairs, viol[keep]


def _single_candidates(pts, r, z, keep_mask):
    """Critical points of |p - z| on each full sphere S(x_i, r)."""
    base = pts[keep_mask]
    u = z - base
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    degenerate = norms[:, 0] < 1e-14
    dirs = u / np.where(norms == 0, 1.0, norms)
    if degenerate.any():
        fallback = np.zeros_like(dirs[degenerate])
        fallback[:, 0] = 1.0
        dirs[degenerate] = fallback
    return np.concatenate([base + r * dirs, base - r * dirs])


def _pair_candidates(pts, r, z, edge_pairs, exclude):
    """Critical points of |p - z| on the listed pair circles (d = 3)."""
    if edge_pairs is None:
        m = len(pts)
        if m < 2:
            return np.empty((0, 3))
        ii, jj = np.triu_indices(m, 1)
    else:
        edge_pairs = np.asarray(edge_pairs, dtype=np.int64).reshape(-1, 2)
        ii, jj = edge_pairs[:, 0], edge_pairs[:, 1]
    sel = (ii != exclude) & (jj != exclude)
    ii, jj = ii[sel], jj[sel]
    if len(ii) == 0:
        return np.empty((0, 3))
    ok, mid, axis, circ_r = _pair_frames(pts, r, ii, jj)
    mid, axis, circ_r = mid[ok], axis[ok], circ_r[ok]
    if len(mid) == 0:
        return np.empty((0, 3))
    w = (z - mid) - ((z - mid) * axis).sum(axis=1, keepdims=True) * axis
    wn = np.linalg.norm(w, axis=1)
    degen = wn < 1e-14
    wdir = np.empty_like(w)
    wdir[~degen] = w[~degen] / wn[~degen, None]
    for k in np.flatnonzero(degen):
        wdir[k] = _perp_basis(axis[k])
    return np.concatenate(
        [mid + circ_r[:, None] * wdir, mid - circ_r[:, None] * wdir]
    )


def _feasible_mask(cands, pts, r, slack, exclude):
    thr2 = (r + slack) ** 2
    mask = np.ones(len(cands), dtype=bool)
    for start in range(0, len(cands), _CHUNK):
        block = cands[start : start + _CHUNK]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        if exclude >= 0:
            d2[:, exclude] = 0.0
        mask[start : start + _CHUNK] = ~(d2 > thr2).any(axis=1)
    return mask


def max_dist_query(pts, r, slack, z, exclude, cand, edge_pairs=None):
    """Exact max of |p - z| over the center body of ``pts`` minus ``exclude``.

    ``cand`` are precomputed feasible size-d locus points (already filtered
    by the caller).  Returns ``(dist, point, n_feasible)``; ``n_feasible``
    of zero signals an empty center body.
    """
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    d = pts.shape[1]
    keep = np.arange(len(pts)) != exclude
    cands = [np.asarray(cand, dtype=np.float64).reshape(-1, d)]
    singles = _single_candidates(pts, r, z, keep)
    feas = _feasible_mask(singles, pts, r, slack, exclude)
    cands.append(singles[feas])
    if d == 3:
        pairs = _pair_candidates(pts, r, z, edge_pairs, exclude)
        if len(pairs):
            feas = _feasible_mask(pairs, pts, r, slack, exclude)
            cands.append(pairs[feas])
    allc = np.concatenate(cands)
    if len(allc) == 0:
        return -1.0, np.full(d, np.nan), 0
    dists = np.linalg.norm(allc - z, axis=1)
    best = int(dists.argmax())
    return float(dists[best]), allc[best].copy(), int(len(allc))


def hull_contains_batch(pts, r, slack, queries, cand, edge_pairs=None):
    """Membership of each query in the ball hull of ``pts`` (radius r).

    ``cand`` must be the feasible size-d locus points of the constraint
    set.  The caller is responsible for ensuring the center body is
    nonempty.
    """
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    cand = np.asarray(cand, dtype=np.float64).reshape(-1, pts.shape[1])
    thr = r + slack
    inside = np.ones(len(queries), dtype=np.uint8)
    for qi, z in enumerate(queries):
        if len(cand) and (np.linalg.norm(cand - z, axis=1) > thr).any():
            inside[qi] = 0
            continue
        dist, _, feas = max_dist_query(pts, r, slack, z, -1, cand[:0], edge_pairs)
        if feas and dist > thr:
            inside[qi] = 0
    return inside
