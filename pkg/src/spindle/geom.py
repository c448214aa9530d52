"""Exact low-dimensional geometric predicates and constructions.

Everything here is a pure function of its inputs: determinant volumes,
circumspheres, the two radius-r supporting-ball centers of a point tuple,
sphere-intersection loci, spindle membership, and the unit-ball constants
kappa_d / omega_d.  All reals are 64-bit floats; degeneracies are reported,
never silently resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, DomainError

# Affine independence: normalized Gram determinant of the difference
# vectors must exceed this.
GRAM_TOL = 1e-12

# Comparisons of a circumradius against the ball radius r tolerate this
# much relative slack before declaring the tuple out of position.
RADIUS_TOL = 1e-12


@dataclass(frozen=True)
class Sphere:
    """A sphere of some dimension inside R^d.

    ``flat_basis`` holds orthonormal row vectors spanning the affine hull
    the sphere lives in (relative to ``center``).  An empty basis means the
    sphere is full-dimensional in the ambient space.
    """

    center: np.ndarray
    radius: float
    flat_basis: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "flat_basis", np.asarray(self.flat_basis, dtype=float))
        if self.radius < 0:
            raise DomainError(f"sphere radius must be nonnegative, got {self.radius}")

    @property
    def ambient_dim(self) -> int:
        return len(self.center)

    @property
    def flat_dim(self) -> int:
        """Dimension of the affine hull (ambient when the basis is empty)."""
        if self.flat_basis.size == 0:
            return self.ambient_dim
        return self.flat_basis.shape[0]


@dataclass(frozen=True)
class DimConstants:
    """Unit-ball volume and unit-sphere surface measure in dimension d."""

    d: int
    kappa: float
    omega: float


def unit_ball_constants(d: int) -> DimConstants:
    """Volume kappa_d of the unit d-ball and surface measure omega_d.

    kappa_d = pi^(d/2) / Gamma(d/2 + 1) evaluated through the exact
    two-step recursion kappa_d = kappa_{d-2} * 2*pi/d, and omega_d = d * kappa_d.
    """
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= 10:
        raise DomainError(f"dimension must be an integer in [1, 10], got {d!r}")
    kappa = [1.0, 2.0]  # dimensions 0 and 1
    for k in range(2, d + 1):
        kappa.append(kappa[k - 2] * 2.0 * math.pi / k)
    return DimConstants(d=int(d), kappa=kappa[d], omega=d * kappa[d])


def as_point_matrix(points, d: int | None = None) -> np.ndarray:
    """Stack a sequence of points into an (m, d) float matrix, validating shape."""
    mat = np.atleast_2d(np.asarray(points, dtype=float))
    if mat.ndim != 2:
        raise DomainError("points must form a 2-d array of coordinates")
    if d is not None and mat.shape[1] != d:
        raise DomainError(f"expected points of dimension {d}, got {mat.shape[1]}")
    if not np.isfinite(mat).all():
        raise DomainError("point coordinates must be finite")
    return mat


def parallelotope_volume(vectors) -> float:
    """Volume of the parallelotope spanned by d vectors in R^d (|det|)."""
    mat = as_point_matrix(vectors)
    m, d = mat.shape
    if m != d:
        raise DomainError(f"need exactly {d} vectors of dimension {d}, got {m}")
    return abs(float(np.linalg.det(mat.T)))


def simplex_volume(points) -> float:
    """Volume of the simplex on d+1 points in R^d."""
    mat = as_point_matrix(points)
    m, d = mat.shape
    if m != d + 1:
        raise DomainError(f"need exactly {d + 1} points of dimension {d}, got {m}")
    return parallelotope_volume(mat[1:] - mat[0]) / math.factorial(d)


def _difference_gram(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Difference vectors from the first point and their Gram matrix."""
    diffs = mat[1:] - mat[0]
    return diffs, diffs @ diffs.T


def _check_affinely_independent(gram: np.ndarray) -> None:
    scale = float(np.prod(np.diag(gram)))
    det = float(np.linalg.det(gram)) if gram.size else 1.0
    if det <= GRAM_TOL * scale or scale == 0.0:
        raise DegeneracyError("points are affinely dependent within tolerance")


def circumsphere(points) -> Sphere:
    """The unique sphere through k points (2 <= k <= d) inside their affine hull.

    The center solves the perpendicular-bisector system restricted to the
    affine hull; ``flat_basis`` spans that hull.
    """
    mat = as_point_matrix(points)
    k, d = mat.shape
    if not 2 <= k <= d:
        raise DomainError(f"need between 2 and {d} points, got {k}")
    diffs, gram = _difference_gram(mat)
    _check_affinely_independent(gram)
    rhs = 0.5 * np.einsum("ij,ij->i", diffs, diffs)
    coeffs = np.linalg.solve(gram, rhs)
    center = mat[0] + coeffs @ diffs
    radius = float(np.linalg.norm(center - mat[0]))
    basis = np.linalg.qr(diffs.T)[0].T  # orthonormal rows spanning the hull
    return Sphere(center=center, radius=radius, flat_basis=basis)


def lex_positive(vector: np.ndarray) -> np.ndarray:
    """Flip the sign so the first nonzero component is positive."""
    for comp in vector:
        if comp > 0:
            return vector
        if comp < 0:
            return -vector
    return vector


def affine_hull_normal(points) -> np.ndarray:
    """Lexicographically positive unit normal of d points' affine hull in R^d."""
    mat = as_point_matrix(points)
    k, d = mat.shape
    if k != d:
        raise DomainError(f"need exactly {d} points to define a hyperplane normal")
    diffs = mat[1:] - mat[0]
    if d == 2:
        normal = np.array([-diffs[0, 1], diffs[0, 0]])
    elif d == 3:
        normal = np.cross(diffs[0], diffs[1])
    else:
        # orthogonal complement of the row space via SVD
        normal = np.linalg.svd(diffs)[2][-1]
    norm = np.linalg.norm(normal)
    if norm == 0.0:
        raise DegeneracyError("points are affinely dependent; normal undefined")
    return lex_positive(normal / norm)


def radius_r_centers(points, r: float):
    """The two centers of radius-r spheres through d affinely independent points.

    Returns ``(p_minus, p_plus) = c -/+ sqrt(r^2 - rho^2) * nu`` with ``c`` the
    circumcenter, ``rho`` the circumradius and ``nu`` the lexicographically
    positive unit normal of the points' affine hull, or ``None`` when
    ``rho > r`` (the points are not in hyperconvex position).  When ``rho``
    equals ``r`` within tolerance the two centers coincide.
    """
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    mat = as_point_matrix(points)
    k, d = mat.shape
    if k != d:
        raise DomainError(f"need exactly {d} points in R^{d}, got {k}")
    sphere = circumsphere(mat) if d > 1 else None
    if sphere is None:
        raise DomainError("dimension must be at least 2")
    if sphere.radius > r * (1.0 + RADIUS_TOL):
        return None
    height = math.sqrt(max(r * r - sphere.radius**2, 0.0))
    normal = affine_hull_normal(mat)
    return sphere.center - height * normal, sphere.center + height * normal


def sphere_intersection_locus(centers, r: float):
    """The set {p : |p - x_i| = r for all i} for k <= d sphere centers x_i.

    Returns a :class:`Sphere` of dimension d - k: its center is the
    circumcenter of the inputs, its radius sqrt(r^2 - rho^2), and its flat
    the orthogonal complement of the centers' difference span.  Returns
    ``None`` when the circumradius rho exceeds r, i.e. the spheres miss
    each other.
    """
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    mat = as_point_matrix(centers)
    k, d = mat.shape
    if k > d:
        raise DomainError(f"at most {d} centers supported in R^{d}, got {k}")
    if k == 1:
        return Sphere(center=mat[0], radius=float(r))
    csph = circumsphere(mat)
    if csph.radius > r * (1.0 + RADIUS_TOL):
        return None
    radius = math.sqrt(max(r * r - csph.radius**2, 0.0))
    # complement of the difference span: the trailing right-singular vectors
    diffs = mat[1:] - mat[0]
    _, sing, vt = np.linalg.svd(diffs, full_matrices=True)
    basis = vt[k - 1 :]
    return Sphere(center=csph.center, radius=radius, flat_basis=basis)


def _in_planar_spindle(axial: float, lateral: float, gap: float, r: float) -> bool:
    """Membership of the point (axial, lateral) in the planar r-spindle of
    (0, 0) and (gap, 0)."""
    half = 0.5 * gap
    height = math.sqrt(max(r * r - half * half, 0.0))
    tol = 1e-12 * max(1.0, r)
    for sign in (-1.0, 1.0):
        dx = axial - half
        dy = lateral - sign * height
        if math.hypot(dx, dy) > r + tol:
            return False
    return True


def in_spindle(z, x, y, r: float) -> bool:
    """Whether z lies in the r-spindle of x and y.

    The spindle is the intersection of every closed radius-r ball containing
    both endpoints.  In the plane this is the intersection of the two extreme
    balls; in R^3 the spindle is the surface of revolution of the planar one
    about the x-y axis, so membership reduces to the planar test on
    (axial, radial) coordinates.
    """
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (z.shape == x.shape == y.shape) or z.ndim != 1:
        raise DomainError("z, x, y must be points of one common dimension")
    d = len(z)
    if d not in (2, 3):
        raise DomainError(f"spindle membership supports d in {{2, 3}}, got {d}")
    gap = float(np.linalg.norm(y - x))
    if gap > 2 * r:
        raise DomainError(f"no radius {r} ball contains points {gap} apart")
    if gap < 1e-14:
        return bool(np.linalg.norm(z - x) <= 1e-12 * max(1.0, r))
    axis = (y - x) / gap
    axial = float((z - x) @ axis)
    lateral = float(np.linalg.norm((z - x) - axial * axis))
    return _in_planar_spindle(axial, lateral, gap, r)
