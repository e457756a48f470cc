"""Closed convex regions of the complex plane indexed by a semi-angle.

Every family is described by a :class:`RegionSpec` and a signed *margin*:
the minimum slack over the region's defining inequalities, non-negative
exactly on the region. At semi-angle zero all families except the unit disk
collapse to real segments and the margin becomes minus the distance to the
segment.

All functions accept scalars or numpy arrays of complex points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import math

import numpy as np

from .errors import DegenerateAngle
from .rng import SplitMix64

HALF_PI = 0.5 * math.pi
DIST_SAMPLES = 4096
_RAY_REACH = 2.5
_BISECT_STEPS = 64


class Family(str, Enum):
    SECTOR = "Sector"
    CSET = "Cset"
    OMEGA = "Omega"
    QSET = "Qset"
    LSET = "Lset"
    DSET = "Dset"
    BSET = "Bset"
    UNIT_DISK = "UnitDisk"


_ALIASES = {
    "s": Family.SECTOR,
    "sector": Family.SECTOR,
    "c": Family.CSET,
    "cset": Family.CSET,
    "omega": Family.OMEGA,
    "om": Family.OMEGA,
    "q": Family.QSET,
    "qset": Family.QSET,
    "l": Family.LSET,
    "lset": Family.LSET,
    "d": Family.DSET,
    "dset": Family.DSET,
    "b": Family.BSET,
    "bset": Family.BSET,
    "disk": Family.UNIT_DISK,
    "unitdisk": Family.UNIT_DISK,
    "unit_disk": Family.UNIT_DISK,
}


def parse_family(name) -> Family:
    if isinstance(name, Family):
        return name
    key = str(name).strip().lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown region family {name!r}")
    return _ALIASES[key]


def check_angle(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 <= alpha < HALF_PI):
        raise ValueError(f"semi-angle must lie in [0, pi/2), got {alpha!r}")
    return alpha


@dataclass(frozen=True)
class RegionSpec:
    """One member of the region family at semi-angle ``alpha``.

    ``alpha`` is ignored (and normalised to 0) for the unit disk.
    """

    family: Family
    alpha: float = 0.0

    def __post_init__(self):
        fam = parse_family(self.family)
        object.__setattr__(self, "family", fam)
        alpha = 0.0 if fam is Family.UNIT_DISK else check_angle(self.alpha)
        object.__setattr__(self, "alpha", alpha)

    @property
    def degenerate(self) -> bool:
        return self.alpha == 0.0 and self.family is not Family.UNIT_DISK

    @property
    def bounded(self) -> bool:
        return self.family is not Family.SECTOR

    @property
    def anchor(self) -> float:
        """Deep interior point used by the distance bisection."""
        return 0.0 if self.family is Family.BSET else 0.5

    def __str__(self) -> str:
        if self.family is Family.UNIT_DISK:
            return "UnitDisk"
        return f"{self.family.value}(alpha={self.alpha:.12g})"


# Segment each family collapses to at alpha = 0; ``None`` upper end means a ray.
_SEGMENTS = {
    Family.SECTOR: (0.0, None),
    Family.CSET: (-1.0, 1.0),
    Family.OMEGA: (0.0, 1.0),
    Family.QSET: (0.0, 1.0),
    Family.LSET: (0.0, 1.0),
    Family.DSET: (0.0, 1.0),
    Family.BSET: (0.0, 0.0),
}


def _segment_distance(z, lo: float, hi) -> np.ndarray:
    x = np.real(z)
    xc = np.maximum(x, lo) if hi is None else np.clip(x, lo, hi)
    return np.abs(z - xc)


def segment_distances(z: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each z to each segment [a_j, b_j]; shape (len(z), len(a))."""
    ab = b - a
    L2 = np.abs(ab) ** 2
    safe = np.where(L2 > 0, L2, 1.0)
    rel = z[:, None] - a[None, :]
    t = np.real(rel * np.conj(ab)[None, :]) / safe[None, :]
    t = np.clip(np.where(L2[None, :] > 0, t, 0.0), 0.0, 1.0)
    return np.abs(rel - t * ab[None, :])


def principal_sqrt(z):
    """Square root with ``Re >= 0``; ``sqrt(-r) = i sqrt(r)`` on the cut."""
    z = np.asarray(z, dtype=np.complex128)
    r = np.sqrt(z)
    on_cut = (np.imag(z) == 0) & (np.real(z) < 0)
    return np.where(on_cut, 1j * np.sqrt(np.abs(np.real(z))), r)


def _cset_margin(z, alpha):
    s, c = math.sin(alpha), math.cos(alpha)
    return np.minimum(1.0 - np.abs(z * s + 1j * c), 1.0 - np.abs(z * s - 1j * c))


def _margin(spec: RegionSpec, z: np.ndarray) -> np.ndarray:
    fam, alpha = spec.family, spec.alpha
    if fam is Family.UNIT_DISK:
        return 1.0 - np.abs(z)
    if alpha == 0.0:
        lo, hi = _SEGMENTS[fam]
        return -_segment_distance(z, lo, hi)
    if fam is Family.SECTOR:
        return np.where(z == 0, alpha, alpha - np.abs(np.angle(z)))
    if fam is Family.CSET:
        return _cset_margin(z, alpha)
    if fam is Family.BSET:
        return np.minimum(_cset_margin(z, alpha), _cset_margin(1j * z, alpha))
    if fam is Family.OMEGA:
        return (1.0 - np.abs(z)) * math.tan(alpha) - 2.0 * np.abs(np.imag(principal_sqrt(z)))
    if fam is Family.QSET:
        lens = (1.0 - np.abs(z) ** 2) * math.tan(alpha)
        return np.minimum(lens - 2.0 * np.abs(np.imag(z)), lens + 2.0 * np.real(z))
    if fam is Family.LSET:
        s, c = math.sin(alpha), math.cos(alpha)
        w = (z - 0.5) * s
        return np.minimum(0.5 - np.abs(w + 0.5j * c), 0.5 - np.abs(w - 0.5j * c))
    if fam is Family.DSET:
        disk = math.sin(alpha) - np.abs(z)
        # |arg(1 - z)| <= a written as two half-planes: same set, continuous at z = 1
        wedge = math.sin(alpha) * np.real(1.0 - z) - math.cos(alpha) * np.abs(np.imag(z))
        cap = np.minimum(math.cos(alpha) - np.abs(z - 1.0), wedge)
        return np.maximum(disk, cap)
    raise AssertionError(fam)


def margin(spec: RegionSpec, z):
    """Signed slack of ``z`` in the region (>= 0 inside, < 0 outside)."""
    arr = np.asarray(z, dtype=np.complex128)
    out = _margin(spec, arr)
    return float(out) if np.ndim(out) == 0 else out


def contains(spec: RegionSpec, z, tol: float = 1e-9):
    m = np.asarray(margin(spec, z))
    out = m >= -tol
    return bool(out) if out.ndim == 0 else out


def omega_boundary_point(alpha: float, t):
    """Boundary point ``(e^{it} - i cos a)^2 / sin^2 a`` of Omega.

    ``t`` ranges over ``[pi/2 - a, pi/2 + a]``; both end points map to 1.
    """
    alpha = check_angle(alpha)
    if alpha == 0.0:
        raise DegenerateAngle("Omega(0) is the segment [0, 1]; no curve parameterisation")
    t = np.asarray(t, dtype=np.float64)
    out = (np.exp(1j * t) - 1j * math.cos(alpha)) ** 2 / math.sin(alpha) ** 2
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BoundarySamples:
    """Closed counterclockwise boundary trace (``points[0] == points[-1]``)."""

    spec: RegionSpec
    params: np.ndarray
    points: np.ndarray


def _ray_boundary(spec: RegionSpec, center: complex, phis: np.ndarray) -> np.ndarray:
    """Boundary crossing along rays ``center + r e^{i phi}`` by bisection.

    Returns the inside end of the final bracket so the point has margin >= 0.
    """
    direction = np.exp(1j * phis)
    lo = np.zeros(phis.shape)
    hi = np.full(phis.shape, _RAY_REACH)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        inside = _margin(spec, center + mid * direction) >= 0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return center + lo * direction


def _sampling_center(spec: RegionSpec) -> complex:
    return 0.0 if spec.family in (Family.CSET, Family.BSET, Family.UNIT_DISK) else 0.5


def _signed_area(points: np.ndarray) -> float:
    x, y = points.real, points.imag
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))


def boundary_samples(spec: RegionSpec, m: int) -> BoundarySamples:
    """Sample the region boundary counterclockwise with ``m`` parameter values.

    Omega uses its curve parameterisation; the unit disk uses equally spaced
    angles; the remaining families are traced by bisecting rays from an
    interior centre. Degenerate (alpha = 0) families are traversed as the
    segment out and back.
    """
    if m < 4:
        raise ValueError("need at least 4 boundary samples")
    if not spec.bounded:
        raise ValueError("the sector is unbounded; it has no closed boundary trace")
    if spec.degenerate:
        lo, hi = _SEGMENTS[spec.family]
        half = max(m // 2, 1)
        fwd = np.linspace(lo, hi, half + 1)
        params = np.concatenate([fwd, fwd[-2::-1]])
        points = params.astype(np.complex128)
        return BoundarySamples(spec, params, points)
    if spec.family is Family.UNIT_DISK:
        params = 2.0 * math.pi * np.arange(m + 1) / m
        points = np.exp(1j * params)
        points[-1] = points[0]
    elif spec.family is Family.OMEGA:
        a = spec.alpha
        params = np.linspace(HALF_PI - a, HALF_PI + a, m + 1)
        points = omega_boundary_point(a, params)
        points[-1] = points[0]
    else:
        params = 2.0 * math.pi * np.arange(m + 1) / m
        points = _ray_boundary(spec, _sampling_center(spec), params)
        points[-1] = points[0]
    if _signed_area(points) < 0:
        params, points = params[::-1].copy(), points[::-1].copy()
    return BoundarySamples(spec, params, points)


@lru_cache(maxsize=256)
def _ray_trace(spec: RegionSpec, m: int) -> tuple:
    """Ray angles and boundary points on ``m`` equally spaced rays (not closed)."""
    phis = 2.0 * math.pi * np.arange(m) / m
    return phis, _ray_boundary(spec, _sampling_center(spec), phis)


def _sector_distance(z: np.ndarray, alpha: float) -> np.ndarray:
    phi = np.abs(np.angle(z))
    r = np.abs(z)
    return np.where(
        phi <= alpha, 0.0, np.where(phi >= alpha + HALF_PI, r, r * np.sin(phi - alpha))
    )


def _bisect_to_anchor(spec: RegionSpec, z: np.ndarray) -> np.ndarray:
    anchor = spec.anchor
    lo = np.zeros(z.shape)  # outside end
    hi = np.ones(z.shape)  # anchor end (inside)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        inside = _margin(spec, z + mid * (anchor - z)) >= 0
        hi = np.where(inside, mid, hi)
        lo = np.where(inside, lo, mid)
    return hi * np.abs(anchor - z)


def _golden_min(f, a: np.ndarray, b: np.ndarray, iters: int = 40) -> np.ndarray:
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc < fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - gr * (b - a), d)
        d_new = np.where(left, c, a + gr * (b - a))
        fc, fd = np.where(left, f(c_new), fd), np.where(left, fc, f(d_new))
        c, d = c_new, d_new
    return np.minimum(fc, fd)


def _refine_nearest(spec: RegionSpec, z: np.ndarray) -> np.ndarray:
    """Distance from outside points to the boundary traced on rays.

    The nearest edge of the ray-sampled polygon selects a bracket of ray
    angles (that edge and its two neighbours); golden-section search then
    runs on each of the three sub-intervals. Only genuine boundary points
    are measured, so the result is an upper bound on the distance.
    """
    phis, pts = _ray_trace(spec, DIST_SAMPLES)
    m = phis.size
    center = _sampling_center(spec)
    edges = segment_distances(z, pts, np.roll(pts, -1))
    j = np.argmin(edges, axis=1)
    best = np.min(np.abs(z[:, None] - pts[None, :]), axis=1)

    zz = np.tile(z, 3)

    def f(phi):
        return np.abs(zz - _ray_boundary(spec, center, phi))

    step = 2.0 * math.pi / m
    lo = np.concatenate([phis[j] - step, phis[j], phis[j] + step])
    found = _golden_min(f, lo, lo + step, iters=30).reshape(3, -1).min(axis=0)
    return np.minimum(best, found)


def dist_to_region(spec: RegionSpec, z, refine: bool = True):
    """Upper bound on the Euclidean distance from ``z`` to the region.

    Zero when the margin is non-negative. Exact for the unit disk, the
    sector and degenerate segments. Otherwise the minimum of: the bisection
    crossing on the segment to the interior anchor, the nearest of 4096
    ray-traced boundary points and (with ``refine``) a golden-section search
    along the boundary near the closest edge of that trace.
    """
    arr = np.asarray(z, dtype=np.complex128)
    flat = arr.reshape(-1)
    out = np.zeros(flat.shape)
    outside = _margin(spec, flat) < 0
    if np.any(outside):
        w = flat[outside]
        if spec.family is Family.UNIT_DISK:
            d = np.abs(w) - 1.0
        elif spec.degenerate:
            lo, hi = _SEGMENTS[spec.family]
            d = _segment_distance(w, lo, hi)
        elif spec.family is Family.SECTOR:
            d = _sector_distance(w, spec.alpha)
        else:
            d = _bisect_to_anchor(spec, w)
            if refine:
                d = np.minimum(d, _refine_nearest(spec, w))
            else:
                pts = _ray_trace(spec, DIST_SAMPLES)[1]
                d = np.minimum(d, np.min(np.abs(w[:, None] - pts[None, :]), axis=1))
        out[outside] = np.maximum(d, 0.0)
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def omega_max_im(alpha: float) -> float:
    """Largest ``|Im z|`` over Omega(alpha).

    The maximiser is the boundary point at the critical parameter ``g`` with
    ``sin g = (cos a + sqrt(cos^2 a + 8)) / 4`` and the value is
    ``(sin 2g - 2 cos a cos g) / sin^2 a``. It is evaluated in the
    cancellation-free form ``4 cos g / (sqrt(cos^2 a + 8) + 3 cos a)``.
    Returns 0 at ``alpha = 0`` where Omega is the segment [0, 1].
    """
    alpha = check_angle(alpha)
    if alpha == 0.0:
        return 0.0
    c = math.cos(alpha)
    root = math.sqrt(c * c + 8.0)
    sin_g = (c + root) / 4.0
    # 1 - sin g and 1 + sin g without cancellation; 1 - cos a = 2 sin^2(a/2)
    one_minus = 4.0 * math.sin(0.5 * alpha) ** 2 / (4.0 - c + root)
    cos_g = math.sqrt(one_minus * (1.0 + sin_g))
    return 4.0 * cos_g / (root + 3.0 * c)


def omega_max_im_printed(alpha: float) -> float:
    """The same extremum with ``sin g`` in place of ``cos g`` in the second term.

    Kept only so reports can show how far this variant is from the sampled
    maximum.
    """
    alpha = check_angle(alpha)
    if alpha == 0.0:
        return 0.0
    c = math.cos(alpha)
    sin_g = (c + math.sqrt(c * c + 8.0)) / 4.0
    g = math.asin(sin_g)
    return (math.sin(2.0 * g) - 2.0 * c * sin_g) / math.sin(alpha) ** 2


def omega_curve_derivatives(alpha: float, t):
    """First and second derivatives of the Omega boundary curve in ``t``."""
    s2 = math.sin(alpha) ** 2
    c = math.cos(alpha)
    e = np.exp(1j * np.asarray(t, dtype=np.float64))
    d1 = 2j * e * (e - 1j * c) / s2
    d2 = 2j * e * (2j * e + c) / s2
    return d1, d2


@dataclass
class ConvexityReport:
    alpha: float
    samples: int
    min_curvature_numerator: float
    max_closed_form_error: float
    sign_pattern_ok: bool
    min_re: float
    re_floor: float
    polygon_convex: bool
    passed: bool


def omega_convexity_check(alpha: float, m: int = 1000) -> ConvexityReport:
    """Certify convexity of Omega(alpha) from its boundary curve.

    On ``m`` parameter values the curvature numerator
    ``-Im(z' conj(z''))`` must be positive and agree with its closed form
    ``4 (2 + cos^2 a - 3 cos a sin t) / sin^4 a``; ``d^2y/dx^2`` must be
    negative before ``pi/2`` and positive after; and ``Re z`` must stay at or
    above ``-tan^2(a/2)``. The sampled polygon must also turn left at every
    vertex.
    """
    alpha = check_angle(alpha)
    if alpha == 0.0:
        raise DegenerateAngle("convexity of Omega(0) = [0, 1] is trivial")
    c, s = math.cos(alpha), math.sin(alpha)
    t = np.linspace(HALF_PI - alpha, HALF_PI + alpha, m)
    d1, d2 = omega_curve_derivatives(alpha, t)
    numer = -np.imag(d1 * np.conj(d2))
    closed = 4.0 * (2.0 + c * c - 3.0 * c * np.sin(t)) / s**4
    closed_err = float(np.max(np.abs(numer - closed) / np.abs(closed)))
    re_d1 = np.real(d1)
    y_xx = numer / re_d1**3
    before = t < HALF_PI
    after = t > HALF_PI
    # skip the point where Re z' vanishes (vertical tangent)
    sharp = np.abs(t - HALF_PI) > 1e-12
    signs_ok = bool(np.all(y_xx[before & sharp] < 0) and np.all(y_xx[after & sharp] > 0))
    zeta = omega_boundary_point(alpha, t)
    min_re = float(np.min(zeta.real))
    floor = -math.tan(0.5 * alpha) ** 2
    pts = boundary_samples(RegionSpec(Family.OMEGA, alpha), m).points
    convex = _polygon_turns_left(pts)
    passed = bool(
        np.all(numer > 0)
        and closed_err <= 1e-9
        and signs_ok
        and min_re >= floor - 1e-12
        and convex
    )
    return ConvexityReport(
        alpha, m, float(numer.min()), closed_err, signs_ok, min_re, floor, convex, passed
    )


def _polygon_turns_left(closed_points: np.ndarray, rtol: float = 1e-9) -> bool:
    p = closed_points[:-1]
    e = np.roll(p, -1) - p
    keep = np.abs(e) > 0
    e = e[keep]
    cross = np.imag(np.conj(e) * np.roll(e, -1))
    return bool(np.all(cross >= -rtol * np.abs(e) * np.abs(np.roll(e, -1))))


@dataclass
class ContainmentReport:
    inner: str
    outer: str
    samples: int
    tol: float
    worst_margin: float
    worst_dist: float
    witness: complex
    passed: bool


def containment_check(inner: RegionSpec, outer: RegionSpec, m: int = 1024, tol: float = 1e-8) -> ContainmentReport:
    """Test ``inner`` within ``outer`` on ``m`` boundary samples of ``inner``.

    Both regions are convex, so the boundary trace decides containment up to
    sampling. Passes iff every sample is within distance ``tol`` of ``outer``;
    the witness is the sample with the smallest margin.
    """
    pts = boundary_samples(inner, m).points[:-1]
    margins = _margin(outer, pts)
    k = int(np.argmin(margins))
    dists = dist_to_region(outer, pts, refine=False)
    loose = dists > tol
    if np.any(loose):
        dists[loose] = dist_to_region(outer, pts[loose])
    worst_dist = float(np.max(dists))
    return ContainmentReport(
        str(inner), str(outer), m, tol, float(margins[k]), worst_dist, complex(pts[k]), worst_dist <= tol
    )


def sample_region(spec: RegionSpec, count: int, rng: SplitMix64) -> np.ndarray:
    """Uniform points of a bounded region by rejection from ``[-1, 1]^2``.

    Degenerate regions are sampled uniformly along their segment.
    """
    if not spec.bounded:
        raise ValueError("cannot sample the unbounded sector")
    if spec.degenerate:
        lo, hi = _SEGMENTS[spec.family]
        return (lo + (hi - lo) * rng.uniform(count)).astype(np.complex128)
    found = []
    have = 0
    batch = max(4 * count, 4096)
    while have < count:
        u = 2.0 * rng.uniform(2 * batch).reshape(batch, 2) - 1.0
        z = u[:, 0] + 1j * u[:, 1]
        z = z[_margin(spec, z) >= 0]
        found.append(z)
        have += z.size
    return np.concatenate(found)[:count]


@dataclass
class ClosureReport:
    region: str
    factor_region: str
    trials: int
    seed: int
    violations: int
    worst_margin: float
    witness: tuple = field(default_factory=tuple)
    passed: bool = True


def semigroup_closure_check(spec: RegionSpec, trials: int = 10_000, seed: int = 42,
                            factor: RegionSpec | None = None, tol: float = 1e-12) -> ClosureReport:
    """Check ``z * w`` stays in ``spec`` for random ``z`` in ``spec``, ``w`` in ``factor``.

    With ``factor`` omitted this tests that the region is a multiplicative
    semigroup. Passing ``spec = Bset(a)`` and ``factor = Cset(a)`` tests the
    ideal property instead.
    """
    factor = spec if factor is None else factor
    if spec.family not in (Family.CSET, Family.OMEGA, Family.QSET, Family.BSET):
        raise ValueError(f"closure is only defined for Cset, Omega, Qset and Bset, got {spec}")
    if factor.alpha != spec.alpha:
        raise ValueError("both regions must share the semi-angle")
    rng = SplitMix64(seed)
    z = sample_region(spec, trials, rng.split(0))
    w = sample_region(factor, trials, rng.split(1))
    prod = z * w
    margins = _margin(spec, prod)
    k = int(np.argmin(margins))
    bad = int(np.count_nonzero(margins < -tol))
    return ClosureReport(
        str(spec), str(factor), trials, seed, bad, float(margins[k]),
        (complex(z[k]), complex(w[k])), bad == 0,
    )
