"""Numerical range (field of values) of a matrix via its support function.

For each direction ``theta`` the support value ``h = max Re(e^{-i theta} z)``
over ``W(A)`` is the top eigenvalue of ``Re(e^{-i theta} A)`` and the Rayleigh
quotient of a top eigenvector is a boundary point of ``W(A)``. Sampling
``m`` directions gives an inner polygon (the support points, contained in
``W(A)``) and an outer polygon (the intersection of the supporting
half-planes, containing ``W(A)``). Their distance certifies the
approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .linalg import adjoint, as_cmatrix, herm_eigen, top_eigenpairs
from .regions import RegionSpec, _margin, dist_to_region, segment_distances

DEFAULT_ANGLES = 720


def support_point(A, theta: float) -> tuple[float, complex]:
    """Support value and a boundary point of ``W(A)`` in direction ``theta``."""
    A = as_cmatrix(A)
    rot = np.exp(-1j * theta) * A
    eig = herm_eigen(0.5 * (rot + adjoint(rot)))
    v = eig.vectors[:, -1]
    p = complex(np.vdot(v, A @ v))
    return float(eig.values[-1]), p


def convex_polygon_distance(z, vertices: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Distance from points to a convex polygon given counterclockwise.

    Points inside (every edge cross product non-negative) get 0. Repeated
    vertices and degenerate polygons (a point or a segment) are allowed.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    v = np.asarray(vertices, dtype=np.complex128)
    a, b = v, np.roll(v, -1)
    d = segment_distances(z, a, b).min(axis=1)
    edge = b - a
    keep = np.abs(edge) > rtol * (1.0 + np.max(np.abs(v)))
    if np.count_nonzero(keep) >= 3:
        cross = np.imag(np.conj(edge[keep])[None, :] * (z[:, None] - a[keep][None, :]))
        inside = np.all(cross >= 0, axis=1)
        d = np.where(inside, 0.0, d)
    return d


@dataclass(frozen=True)
class RangeHull:
    """Inner/outer polygonal enclosure of a numerical range.

    Attributes
    ----------
    angles : ndarray
        Directions ``2 pi k / m``.
    support_values : ndarray
        ``h_k = max Re(e^{-i theta_k} z)`` over ``W(A)``.
    support_points : ndarray
        Points of ``W(A)`` attaining ``h_k``; their convex hull lies in ``W(A)``.
    outer_vertices : ndarray
        Intersections of consecutive supporting lines; vertex ``k`` lies
        between the lines for ``theta_k`` and ``theta_{k+1}``.
    gap : float
        Bound on the Hausdorff distance between the outer polygon and ``W(A)``.
    """

    angles: np.ndarray
    support_values: np.ndarray
    support_points: np.ndarray
    outer_vertices: np.ndarray
    gap: float

    @property
    def scale(self) -> float:
        return float(1.0 + np.max(np.abs(self.support_points)))

    def outer_distance(self, z) -> np.ndarray:
        """Distance from points to the outer polygon (0 inside)."""
        return convex_polygon_distance(z, self.outer_vertices)

    def inner_distance(self, z) -> np.ndarray:
        return convex_polygon_distance(z, self.support_points)


def compute_hull(A, m: int = DEFAULT_ANGLES) -> RangeHull:
    """Certified polygonal enclosure of ``W(A)`` from ``m`` support directions."""
    if m < 3:
        raise ValueError("need at least 3 directions")
    A = as_cmatrix(A)
    theta = 2.0 * math.pi * np.arange(m) / m
    rot = np.exp(-1j * theta)[:, None, None] * A[None, :, :]
    herm = 0.5 * (rot + adjoint(rot))
    h, V = top_eigenpairs(herm)
    AV = np.einsum("ij,kj->ki", A, V)
    p = np.einsum("ki,ki->k", np.conj(V), AV)

    th2 = np.roll(theta, -1)
    th2[-1] += 2.0 * math.pi
    h2 = np.roll(h, -1)
    det = np.sin(th2 - theta)
    x = (h * np.sin(th2) - h2 * np.sin(theta)) / det
    y = (h2 * np.cos(theta) - h * np.cos(th2)) / det
    outer = x + 1j * y

    # vertex k sits between support points k and k+1
    gap = float(np.max(convex_polygon_distance(outer, p)))
    return RangeHull(theta, h, p, outer, gap)


@dataclass
class HullContainmentReport:
    region: str
    tol: float
    gap: float
    worst_dist: float
    worst_margin: float
    witness: complex
    passed: bool


def hull_in_region(hull: RangeHull, spec: RegionSpec, tol: float = 1e-8) -> HullContainmentReport:
    """Decide whether the enclosed numerical range lies in a convex region.

    Passes iff every outer vertex is within ``tol + hull.gap`` of the region.
    Since the outer polygon contains ``W(A)`` and the region is convex, a
    pass means ``W(A)`` lies in the region inflated by ``tol + gap``.
    """
    v = hull.outer_vertices
    margins = _margin(spec, v)
    k = int(np.argmin(margins))
    threshold = tol + hull.gap
    d = dist_to_region(spec, v, refine=False)
    loose = d > threshold
    if np.any(loose):
        d[loose] = dist_to_region(spec, v[loose], refine=True)
    j = int(np.argmax(d))
    worst = float(d[j])
    witness = complex(v[j]) if worst > 0 else complex(v[k])
    return HullContainmentReport(str(spec), tol, hull.gap, worst, float(margins[k]), witness, worst <= threshold)


def convex_hull_points(z) -> np.ndarray:
    """Counterclockwise convex hull of complex points (Andrew's monotone chain).

    Collinear and repeated points are dropped; a segment comes back as its two
    end points and a single point as itself.
    """
    pts = sorted({(float(w.real), float(w.imag)) for w in np.atleast_1d(np.asarray(z, dtype=np.complex128))})
    if len(pts) <= 2:
        return np.array([complex(x, y) for x, y in pts])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return np.array([complex(x, y) for x, y in hull])


def polygon_hausdorff(P: np.ndarray, Q: np.ndarray) -> float:
    """Hausdorff distance between two convex polygons given by CCW vertices.

    For convex sets the distance to the other set is convex, so it is
    maximised at a vertex.
    """
    return float(max(np.max(convex_polygon_distance(P, Q)), np.max(convex_polygon_distance(Q, P))))


def ellipse_support(A, theta) -> np.ndarray:
    """Support function of the elliptical numerical range of a 2x2 matrix.

    ``W(A)`` is the ellipse with foci at the eigenvalues and minor axis
    ``sqrt(tr(A*A) - |l1|^2 - |l2|^2)``. Computed from the eigenvalues only.
    """
    A = as_cmatrix(A)
    if A.shape != (2, 2):
        raise ValueError("the elliptical range formula needs a 2x2 matrix")
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    disc = np.sqrt(tr * tr - 4.0 * det)
    l1, l2 = 0.5 * (tr + disc), 0.5 * (tr - disc)
    center = 0.5 * (l1 + l2)
    focal = 0.5 * abs(l1 - l2)
    minor = 0.5 * math.sqrt(max(np.sum(np.abs(A) ** 2) - abs(l1) ** 2 - abs(l2) ** 2, 0.0))
    major = math.hypot(minor, focal)
    phi = float(np.angle(l1 - l2)) if focal > 0 else 0.0
    theta = np.asarray(theta, dtype=np.float64)
    rel = theta - phi
    return np.real(np.exp(-1j * theta) * center) + np.sqrt(
        (major * np.cos(rel)) ** 2 + (minor * np.sin(rel)) ** 2
    )
