# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration kernels (see _kernels_py for the reference semantics)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

from .errors import DomainError

cnp.import_array()

cdef double POSITION_TOL = 1e-12
cdef double GRAM_TOL = 1e-12
cdef double TINY = 1e-14


cdef inline Py_ssize_t _classify(const double[:, ::1] pts, Py_ssize_t n_free,
                                 const double* c, double thr2, int d,
                                 Py_ssize_t* violator) noexcept:
    """Violations of |x_j - c| <= thr among pts.

    Points from ``n_free`` on are strict: their first violation aborts with
    count 2 (the record is discarded either way).  Among the leading free
    points one violation is tolerated and reported.
    """
    cdef Py_ssize_t j, nbad = 0
    cdef double dx, dy, dz, d2
    violator[0] = -1
    for j in range(n_free, pts.shape[0]):
        dx = pts[j, 0] - c[0]
        dy = pts[j, 1] - c[1]
        d2 = dx * dx + dy * dy
        if d == 3:
            dz = pts[j, 2] - c[2]
            d2 += dz * dz
        if d2 > thr2:
            return 2
    for j in range(n_free):
        dx = pts[j, 0] - c[0]
        dy = pts[j, 1] - c[1]
        d2 = dx * dx + dy * dy
        if d == 3:
            dz = pts[j, 2] - c[2]
            d2 += dz * dz
        if d2 > thr2:
            if nbad == 0:
                violator[0] = j
            nbad += 1
            if nbad > 1:
                violator[0] = -1
                return 2
    return nbad


def _scan_2d(const double[:, ::1] pts, double r, double slack, Py_ssize_t n_free):
    cdef Py_ssize_t m = pts.shape[0]
    cdef double thr2 = (r + slack) * (r + slack)
    cdef double rmax2 = (r * (1.0 + POSITION_TOL)) ** 2
    cdef Py_ssize_t i, j, side, violator
    cdef double vx, vy, vv, rho2, midx, midy, nx, ny, nn, h, sgn
    cdef double cc[2]
    idx_l, side_l, cen_l, viol_l = [], [], [], []
    for i in range(m - 1):
        for j in range(i + 1, m):
            vx = pts[j, 0] - pts[i, 0]
            vy = pts[j, 1] - pts[i, 1]
            vv = vx * vx + vy * vy
            rho2 = 0.25 * vv
            if rho2 > rmax2 or vv <= 0.0:
                continue
            midx = 0.5 * (pts[i, 0] + pts[j, 0])
            midy = 0.5 * (pts[i, 1] + pts[j, 1])
            nx = -vy
            ny = vx
            if nx < 0.0 or (nx == 0.0 and ny < 0.0):
                nx = -nx
                ny = -ny
            nn = sqrt(nx * nx + ny * ny)
            nx /= nn
            ny /= nn
            h = r * r - rho2
            h = sqrt(h) if h > 0.0 else 0.0
            for side in range(2):
                sgn = -1.0 if side == 0 else 1.0
                cc[0] = midx + sgn * h * nx
                cc[1] = midy + sgn * h * ny
                if _classify(pts, n_free, cc, thr2, 2, &violator) <= 1:
                    idx_l.append((i, j))
                    side_l.append(side)
                    cen_l.append((cc[0], cc[1]))
                    viol_l.append(violator)
    return (
        np.array(idx_l, dtype=np.int64).reshape(-1, 2),
        np.array(side_l, dtype=np.int8),
        np.array(cen_l, dtype=np.float64).reshape(-1, 2),
        np.array(viol_l, dtype=np.int64),
    )


def _scan_3d(const double[:, ::1] pts, double r, double slack, Py_ssize_t n_free):
    cdef Py_ssize_t m = pts.shape[0]
    cdef double thr2 = (r + slack) * (r + slack)
    cdef double rmax2 = (r * (1.0 + POSITION_TOL)) ** 2
    cdef Py_ssize_t i, j, k, side, violator
    cdef double v1x, v1y, v1z, v2x, v2y, v2z
    cdef double g11, g12, g22, det, alpha, beta
    cdef double ox, oy, oz, dx, dy, dz, rho2
    cdef double nx, ny, nz, nn, h, sgn
    cdef double cc[3]
    idx_l, side_l, cen_l, viol_l = [], [], [], []
    for i in range(m - 2):
        for j in range(i + 1, m - 1):
            v1x = pts[j, 0] - pts[i, 0]
            v1y = pts[j, 1] - pts[i, 1]
            v1z = pts[j, 2] - pts[i, 2]
            g11 = v1x * v1x + v1y * v1y + v1z * v1z
            for k in range(j + 1, m):
                v2x = pts[k, 0] - pts[i, 0]
                v2y = pts[k, 1] - pts[i, 1]
                v2z = pts[k, 2] - pts[i, 2]
                g22 = v2x * v2x + v2y * v2y + v2z * v2z
                g12 = v1x * v2x + v1y * v2y + v1z * v2z
                det = g11 * g22 - g12 * g12
                if det <= GRAM_TOL * g11 * g22:
                    continue
                alpha = g22 * (g11 - g12) / (2.0 * det)
                beta = g11 * (g22 - g12) / (2.0 * det)
                ox = pts[i, 0] + alpha * v1x + beta * v2x
                oy = pts[i, 1] + alpha * v1y + beta * v2y
                oz = pts[i, 2] + alpha * v1z + beta * v2z
                dx = ox - pts[i, 0]
                dy = oy - pts[i, 1]
                dz = oz - pts[i, 2]
                rho2 = dx * dx + dy * dy + dz * dz
                if rho2 > rmax2:
                    continue
                nx = v1y * v2z - v1z * v2y
                ny = v1z * v2x - v1x * v2z
                nz = v1x * v2y - v1y * v2x
                if nx < 0.0 or (nx == 0.0 and (ny < 0.0 or (ny == 0.0 and nz < 0.0))):
                    nx = -nx
                    ny = -ny
                    nz = -nz
                nn = sqrt(nx * nx + ny * ny + nz * nz)
                nx /= nn
                ny /= nn
                nz /= nn
                h = r * r - rho2
                h = sqrt(h) if h > 0.0 else 0.0
                for side in range(2):
                    sgn = -1.0 if side == 0 else 1.0
                    cc[0] = ox + sgn * h * nx
                    cc[1] = oy + sgn * h * ny
                    cc[2] = oz + sgn * h * nz
                    if _classify(pts, n_free, cc, thr2, 3, &violator) <= 1:
                        idx_l.append((i, j, k))
                        side_l.append(side)
                        cen_l.append((cc[0], cc[1], cc[2]))
                        viol_l.append(violator)
    return (
        np.array(idx_l, dtype=np.int64).reshape(-1, 3),
        np.array(side_l, dtype=np.int8),
        np.array(cen_l, dtype=np.float64).reshape(-1, 3),
        np.array(viol_l, dtype=np.int64),
    )


def scan_tuples(pts, double r, double slack, n_free=None):
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    cdef Py_ssize_t nf = pts.shape[0] if n_free is None else int(n_free)
    if not 0 <= nf <= pts.shape[0]:
        raise DomainError("n_free out of range")
    if pts.shape[1] == 2:
        return _scan_2d(pts, r, slack, nf)
    if pts.shape[1] == 3:
        return _scan_3d(pts, r, slack, nf)
    raise DomainError(f"tuple scans support d in {{2, 3}}, got {pts.shape[1]}")


cdef inline void _perp_of(const double* a, double* out) noexcept:
    # unit vector orthogonal to the unit 3-vector a
    cdef double hx, hy, hz, dot, n
    cdef double a0 = a[0] if a[0] >= 0.0 else -a[0]
    if a0 <= 0.9:
        hx, hy, hz = 1.0, 0.0, 0.0
    else:
        hx, hy, hz = 0.0, 1.0, 0.0
    dot = hx * a[0] + hy * a[1] + hz * a[2]
    out[0] = hx - dot * a[0]
    out[1] = hy - dot * a[1]
    out[2] = hz - dot * a[2]
    n = sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2])
    out[0] /= n
    out[1] /= n
    out[2] /= n


def pair_probe(pts, double r, double slack, n_free=None):
    """One deterministic probe point per in-position pair circle (d = 3).

    Classifies the probe with the same <=1-violator rule as scan_tuples, so
    a pair whose whole circle is feasible (possibly except one removable
    constraint) is discovered even when no tuple locus point lies on it.
    """
    pts_arr = np.ascontiguousarray(pts, dtype=np.float64)
    if pts_arr.shape[1] != 3:
        raise DomainError("pair probes are a d=3 construction")
    cdef const double[:, ::1] P = pts_arr
    cdef Py_ssize_t m = P.shape[0]
    cdef Py_ssize_t nf = m if n_free is None else int(n_free)
    cdef double thr2 = (r + slack) * (r + slack)
    cdef double rmax2 = (r * (1.0 + POSITION_TOL)) ** 2
    cdef Py_ssize_t i, j, violator
    cdef double vx, vy, vz, vv, rho2, circ_r
    cdef double ax[3]
    cdef double wd[3]
    cdef double cc[3]
    pair_l, viol_l = [], []
    for i in range(m - 1):
        for j in range(i + 1, m):
            vx = P[j, 0] - P[i, 0]
            vy = P[j, 1] - P[i, 1]
            vz = P[j, 2] - P[i, 2]
            vv = vx * vx + vy * vy + vz * vz
            rho2 = 0.25 * vv
            if rho2 > rmax2 or vv <= 0.0:
                continue
            circ_r = r * r - rho2
            circ_r = sqrt(circ_r) if circ_r > 0.0 else 0.0
            vv = sqrt(vv)
            ax[0] = vx / vv
            ax[1] = vy / vv
            ax[2] = vz / vv
            _perp_of(ax, wd)
            cc[0] = P[i, 0] + 0.5 * vx + circ_r * wd[0]
            cc[1] = P[i, 1] + 0.5 * vy + circ_r * wd[1]
            cc[2] = P[i, 2] + 0.5 * vz + circ_r * wd[2]
            if _classify(P, nf, cc, thr2, 3, &violator) <= 1:
                pair_l.append((i, j))
                viol_l.append(violator)
    return (
        np.array(pair_l, dtype=np.int64).reshape(-1, 2),
        np.array(viol_l, dtype=np.int64),
    )


cdef inline bint _feasible(const double[:, ::1] pts, const double* c,
                           double thr2, Py_ssize_t exclude, int d) noexcept:
    cdef Py_ssize_t j
    cdef double dx, dy, dz, d2
    for j in range(pts.shape[0]):
        if j == exclude:
            continue
        dx = pts[j, 0] - c[0]
        dy = pts[j, 1] - c[1]
        d2 = dx * dx + dy * dy
        if d == 3:
            dz = pts[j, 2] - c[2]
            d2 += dz * dz
        if d2 > thr2:
            return False
    return True


def max_dist_query(pts, double r, double slack, z, Py_ssize_t exclude, cand,
                   edge_pairs=None):
    """(max |p - z|, argmax point, feasible-candidate evidence count).

    ``cand`` holds the size-d locus points of the constraint set already
    known to be feasible (for ``exclude`` < 0) or feasible except for the
    excluded constraint.  For d=3, ``edge_pairs`` lists the index pairs
    whose circles can meet the center body; None enumerates all pairs.
    """
    pts_arr = np.ascontiguousarray(pts, dtype=np.float64)
    cand_arr = np.ascontiguousarray(
        np.asarray(cand, dtype=np.float64).reshape(-1, pts_arr.shape[1])
    )
    zv = np.ascontiguousarray(np.asarray(z, dtype=np.float64))
    cdef const double[:, ::1] P = pts_arr
    cdef const double[:, ::1] C = cand_arr
    cdef const double[::1] Z = zv
    cdef int d = P.shape[1]
    cdef Py_ssize_t m = P.shape[0]
    cdef bint all_pairs = edge_pairs is None
    ep_arr = (
        np.empty((0, 2), dtype=np.int64)
        if (all_pairs or d == 2)
        else np.ascontiguousarray(np.asarray(edge_pairs, dtype=np.int64).reshape(-1, 2))
    )
    cdef const long long[:, ::1] EP = ep_arr
    cdef double thr2 = (r + slack) * (r + slack)
    cdef double rmax2 = (r * (1.0 + POSITION_TOL)) ** 2
    cdef double best = -1.0
    cdef double bp[3]
    cdef double cc[3]
    cdef double ax[3]
    cdef double wd[3]
    cdef Py_ssize_t nfeas = 0
    cdef Py_ssize_t i, j, t, s, e, npairs
    cdef double ux, uy, uz, nu, sgn, dist2
    cdef double vx, vy, vz, vv, rho2, circ_r, mx, my, mz, wn, proj

    bp[0] = bp[1] = bp[2] = 0.0
    for i in range(C.shape[0]):
        dist2 = 0.0
        for t in range(d):
            dist2 += (C[i, t] - Z[t]) * (C[i, t] - Z[t])
        nfeas += 1
        if dist2 > best:
            best = dist2
            for t in range(d):
                bp[t] = C[i, t]

    # critical points on each full sphere S(x_i, r)
    for i in range(m):
        if i == exclude:
            continue
        ux = Z[0] - P[i, 0]
        uy = Z[1] - P[i, 1]
        uz = (Z[2] - P[i, 2]) if d == 3 else 0.0
        nu = sqrt(ux * ux + uy * uy + uz * uz)
        if nu < TINY:
            ux, uy, uz = 1.0, 0.0, 0.0
            nu = 1.0
        for s in range(2):
            sgn = 1.0 if s == 0 else -1.0
            cc[0] = P[i, 0] + sgn * r * ux / nu
            cc[1] = P[i, 1] + sgn * r * uy / nu
            if d == 3:
                cc[2] = P[i, 2] + sgn * r * uz / nu
            dist2 = 0.0
            for t in range(d):
                dist2 += (cc[t] - Z[t]) * (cc[t] - Z[t])
            if dist2 <= best and nfeas > 0:
                continue
            if _feasible(P, cc, thr2, exclude, d):
                nfeas += 1
                if dist2 > best:
                    best = dist2
                    for t in range(d):
                        bp[t] = cc[t]

    # critical points on pair circles S(x_i, r) ^ S(x_j, r) (d = 3 only)
    if d == 3:
        if all_pairs:
            ii, jj = np.triu_indices(m, 1)
            ep_arr = np.ascontiguousarray(np.stack([ii, jj], axis=1).astype(np.int64))
            EP = ep_arr
        npairs = EP.shape[0]
        for e in range(npairs):
            i = EP[e, 0]
            j = EP[e, 1]
            if i == exclude or j == exclude:
                continue
            vx = P[j, 0] - P[i, 0]
            vy = P[j, 1] - P[i, 1]
            vz = P[j, 2] - P[i, 2]
            vv = vx * vx + vy * vy + vz * vz
            rho2 = 0.25 * vv
            if rho2 > rmax2 or vv <= 0.0:
                continue
            mx = P[i, 0] + 0.5 * vx
            my = P[i, 1] + 0.5 * vy
            mz = P[i, 2] + 0.5 * vz
            nu = sqrt(vv)
            ax[0] = vx / nu
            ax[1] = vy / nu
            ax[2] = vz / nu
            circ_r = r * r - rho2
            circ_r = sqrt(circ_r) if circ_r > 0.0 else 0.0
            proj = (Z[0] - mx) * ax[0] + (Z[1] - my) * ax[1] + (Z[2] - mz) * ax[2]
            wd[0] = Z[0] - mx - proj * ax[0]
            wd[1] = Z[1] - my - proj * ax[1]
            wd[2] = Z[2] - mz - proj * ax[2]
            wn = sqrt(wd[0] * wd[0] + wd[1] * wd[1] + wd[2] * wd[2])
            if wn < TINY:
                _perp_of(ax, wd)
            else:
                wd[0] /= wn
                wd[1] /= wn
                wd[2] /= wn
            for s in range(2):
                sgn = 1.0 if s == 0 else -1.0
                cc[0] = mx + sgn * circ_r * wd[0]
                cc[1] = my + sgn * circ_r * wd[1]
                cc[2] = mz + sgn * circ_r * wd[2]
                dist2 = 0.0
                for t in range(3):
                    dist2 += (cc[t] - Z[t]) * (cc[t] - Z[t])
                if dist2 <= best and nfeas > 0:
                    continue
                if _feasible(P, cc, thr2, exclude, 3):
                    nfeas += 1
                    if dist2 > best:
                        best = dist2
                        for t in range(3):
                            bp[t] = cc[t]

    if nfeas == 0:
        return -1.0, np.full(d, np.nan), 0
    out = np.empty(d)
    for t in range(d):
        out[t] = bp[t]
    return sqrt(best), out, int(nfeas)


def hull_contains_batch(pts, double r, double slack, queries, cand,
                        edge_pairs=None):
    """uint8 flags: 1 when the query is inside the radius-r ball hull of pts."""
    pts_arr = np.ascontiguousarray(pts, dtype=np.float64)
    q_arr = np.ascontiguousarray(np.asarray(queries, dtype=np.float64))
    cand_arr = np.ascontiguousarray(
        np.asarray(cand, dtype=np.float64).reshape(-1, pts_arr.shape[1])
    )
    cdef const double[:, ::1] P = pts_arr
    cdef const double[:, ::1] Q = q_arr
    cdef const double[:, ::1] C = cand_arr
    cdef int d = P.shape[1]
    cdef Py_ssize_t m = P.shape[0]
    cdef Py_ssize_t nq = Q.shape[0]
    cdef bint all_pairs = edge_pairs is None
    ep_list = []
    if d == 3:
        if all_pairs:
            ii, jj = np.triu_indices(m, 1)
            ep_arr = np.ascontiguousarray(np.stack([ii, jj], axis=1).astype(np.int64))
        else:
            ep_arr = np.ascontiguousarray(np.asarray(edge_pairs, dtype=np.int64).reshape(-1, 2))
    else:
        ep_arr = np.empty((0, 2), dtype=np.int64)
    cdef const long long[:, ::1] EP = ep_arr
    # precompute pair circle frames once
    cdef Py_ssize_t npairs = EP.shape[0]
    frames_arr = np.empty((npairs, 7), dtype=np.float64)
    cdef double[:, ::1] FR = frames_arr
    cdef Py_ssize_t e, i, j
    cdef double vx, vy, vz, vv, rho2, circ_r
    cdef double rmax2 = (r * (1.0 + POSITION_TOL)) ** 2
    cdef Py_ssize_t nvalid = 0
    if d == 3:
        for e in range(npairs):
            i = EP[e, 0]
            j = EP[e, 1]
            vx = P[j, 0] - P[i, 0]
            vy = P[j, 1] - P[i, 1]
            vz = P[j, 2] - P[i, 2]
            vv = vx * vx + vy * vy + vz * vz
            rho2 = 0.25 * vv
            if rho2 > rmax2 or vv <= 0.0:
                continue
            circ_r = r * r - rho2
            vv = sqrt(vv)
            FR[nvalid, 0] = P[i, 0] + 0.5 * vx
            FR[nvalid, 1] = P[i, 1] + 0.5 * vy
            FR[nvalid, 2] = P[i, 2] + 0.5 * vz
            FR[nvalid, 3] = vx / vv
            FR[nvalid, 4] = vy / vv
            FR[nvalid, 5] = vz / vv
            FR[nvalid, 6] = sqrt(circ_r) if circ_r > 0.0 else 0.0
            nvalid += 1

    out = np.ones(nq, dtype=np.uint8)
    cdef unsigned char[::1] O = out
    cdef Py_ssize_t qi, t, s
    cdef double zx, zy, zz, ux, uy, uz, nu, sgn, dist2
    cdef double mx, my, mz, wn, proj
    cdef double thr = r + slack
    cdef double thr2 = thr * thr
    cdef double cc[3]
    cdef double ax[3]
    cdef double wd[3]
    cdef bint outside

    for qi in range(nq):
        zx = Q[qi, 0]
        zy = Q[qi, 1]
        zz = Q[qi, 2] if d == 3 else 0.0
        outside = False
        for i in range(C.shape[0]):
            dist2 = (C[i, 0] - zx) * (C[i, 0] - zx) + (C[i, 1] - zy) * (C[i, 1] - zy)
            if d == 3:
                dist2 += (C[i, 2] - zz) * (C[i, 2] - zz)
            if dist2 > thr2:
                outside = True
                break
        if not outside:
            for i in range(m):
                ux = zx - P[i, 0]
                uy = zy - P[i, 1]
                uz = (zz - P[i, 2]) if d == 3 else 0.0
                nu = sqrt(ux * ux + uy * uy + uz * uz)
                # far pole sits at distance nu + r, near pole at |nu - r|
                if nu + r <= thr:
                    continue
                if nu < TINY:
                    continue
                cc[0] = P[i, 0] - r * ux / nu
                cc[1] = P[i, 1] - r * uy / nu
                if d == 3:
                    cc[2] = P[i, 2] - r * uz / nu
                if _feasible(P, cc, thr2, -1, d):
                    outside = True
                    break
                if nu - r > thr:
                    cc[0] = P[i, 0] + r * ux / nu
                    cc[1] = P[i, 1] + r * uy / nu
                    if d == 3:
                        cc[2] = P[i, 2] + r * uz / nu
                    if _feasible(P, cc, thr2, -1, d):
                        outside = True
                        break
        if not outside and d == 3:
            for e in range(nvalid):
                mx = FR[e, 0]
                my = FR[e, 1]
                mz = FR[e, 2]
                ax[0] = FR[e, 3]
                ax[1] = FR[e, 4]
                ax[2] = FR[e, 5]
                circ_r = FR[e, 6]
                proj = (zx - mx) * ax[0] + (zy - my) * ax[1] + (zz - mz) * ax[2]
                wd[0] = zx - mx - proj * ax[0]
                wd[1] = zy - my - proj * ax[1]
                wd[2] = zz - mz - proj * ax[2]
                wn = sqrt(wd[0] * wd[0] + wd[1] * wd[1] + wd[2] * wd[2])
                if wn < TINY:
                    _perp_of(ax, wd)
                else:
                    wd[0] /= wn
                    wd[1] /= wn
                    wd[2] /= wn
                for s in range(2):
                    sgn = 1.0 if s == 0 else -1.0
                    cc[0] = mx + sgn * circ_r * wd[0]
                    cc[1] = my + sgn * circ_r * wd[1]
                    cc[2] = mz + sgn * circ_r * wd[2]
                    dist2 = (
                        (cc[0] - zx) * (cc[0] - zx)
                        + (cc[1] - zy) * (cc[1] - zy)
                        + (cc[2] - zz) * (cc[2] - zz)
                    )
                    if dist2 <= thr2:
                        continue
                    if _feasible(P, cc, thr2, -1, 3):
                        outside = True
                        break
                if outside:
                    break
        if outside:
            O[qi] = 0
    return out
