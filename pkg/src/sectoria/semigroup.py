"""Contraction semigroups ``exp(-tS)`` and their Euler approximation.

Checks here measure, on concrete matrices, how the semigroup generated by an
alpha-sectorial ``S`` sits inside the region family and how fast
``(I + tS/n)^{-n}`` converges to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Iterable, Sequence

import numpy as np

from .linalg import as_cmatrix, cartesian_parts, inv_power, matrix_exp, operator_norm
from .numrange import DEFAULT_ANGLES, compute_hull, hull_in_region
from .regions import Family, RegionSpec, check_angle, omega_max_im
from .report import VACUOUS, Check, VerifyReport
from .sectorial import SectorialMatrix, class_c_norms, resolvent_contraction

ERROR_FLOOR = 1e-12
VACUOUS_BOUND = 1e3
K_LENS = 2.0 + 2.0 / math.sqrt(3.0)


def k_upper(alpha: float) -> float:
    """Upper bound ``min(2 + 2/sqrt 3, (pi - a)/a)`` on the lens constant."""
    alpha = check_angle(alpha)
    if alpha == 0.0:
        return K_LENS
    return min(K_LENS, (math.pi - alpha) / alpha)


def euler_bound(alpha: float, n: int) -> float:
    """Operator-norm Euler error bound ``K_up(a) / (n cos^2 a)``."""
    return k_upper(alpha) / (n * math.cos(alpha) ** 2)


def semigroup(Sm: SectorialMatrix, t: float) -> np.ndarray:
    """``exp(-tS)``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return matrix_exp(-t * Sm.S)


def euler_approx(Sm: SectorialMatrix, t: float, n: int) -> np.ndarray:
    """``(I + (t/n) S)^{-n}``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if n < 1:
        raise ValueError("n must be positive")
    return inv_power(Sm.S, t / n, n)


def fit_slope(ns: Sequence[int], errors: Sequence[float], floor: float = ERROR_FLOOR) -> float:
    """Least-squares slope of ``log error`` against ``log n`` over rows above ``floor``.

    Returns nan with fewer than two usable rows.
    """
    ns = np.asarray(ns, dtype=float)
    err = np.asarray(errors, dtype=float)
    keep = err > floor
    if np.count_nonzero(keep) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(ns[keep]), np.log(err[keep]), 1)
    return float(slope)


@dataclass
class EulerRow:
    n: int
    error: float
    bound: float
    ratio: float
    status: str


@dataclass
class EulerReport:
    alpha: float
    t: float
    rows: list
    slope: float
    passed: bool

    @property
    def usable_rows(self) -> int:
        return sum(r.error > ERROR_FLOOR for r in self.rows)

    @property
    def vacuous(self) -> bool:
        return any(r.status == VACUOUS for r in self.rows)


def euler_error_table(Sm: SectorialMatrix, t: float, ns: Iterable[int]) -> EulerReport:
    """Operator-norm errors of the Euler approximation against the bound.

    A row whose bound exceeds 1e3 is labelled ``"vacuous"``: it cannot fail
    but carries no information.
    """
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly ascending")
    exact = semigroup(Sm, t)
    rows = []
    for n in ns:
        err = operator_norm(euler_approx(Sm, t, n) - exact)
        bound = euler_bound(Sm.alpha, n)
        ratio = err / bound
        if bound > VACUOUS_BOUND:
            status = VACUOUS
        else:
            status = "passed" if ratio <= 1.0 else "failed"
        rows.append(EulerRow(n, err, bound, ratio, status))
    slope = fit_slope(ns, [r.error for r in rows])
    return EulerReport(Sm.alpha, t, rows, slope, all(r.ratio <= 1.0 for r in rows))


def _resolvent_power(w: np.ndarray, n: int) -> np.ndarray:
    # (1 + w/n)^{-n} through log1p keeps accuracy for small |w|/n
    return np.exp(-n * np.log1p(w / n))


def scalar_g_sup(alpha: float, n: int, xmax: float | None = None, m: int = 20_000) -> float:
    """``sup |exp(-w) - (1 + w/n)^{-n}|`` over both rays ``w = x e^{+/- i a}``.

    The grid is ``x = 0`` plus ``m`` log-spaced points in ``[1e-8, xmax]``,
    with ``xmax`` defaulting to ``50 n``.
    """
    alpha = check_angle(alpha)
    if xmax is None:
        xmax = 50.0 * n
    x = np.concatenate([[0.0], np.geomspace(1e-8, xmax, m)])
    best = 0.0
    for sign in (1.0, -1.0):
        w = x * np.exp(1j * sign * alpha)
        g = np.exp(-w) - _resolvent_power(w, n)
        best = max(best, float(np.max(np.abs(g))))
    return best


def _anchor_alpha(alpha: float) -> dict:
    return {"alpha": alpha}


def main_theorem_check(Sm: SectorialMatrix, ts: Iterable[float], m: int = DEFAULT_ANGLES,
                       tol: float = 1e-7) -> VerifyReport:
    """Enclose ``W(exp(-tS))`` and test it against Omega(alpha) and D_alpha."""
    report = VerifyReport()
    omega = RegionSpec(Family.OMEGA, Sm.alpha)
    dset = RegionSpec(Family.DSET, Sm.alpha)
    for t in ts:
        hull = compute_hull(semigroup(Sm, t), m)
        for spec, anchor in ((omega, "W(exp(-tS)) in Omega(alpha)"), (dset, "W(exp(-tS)) in D_alpha")):
            r = hull_in_region(hull, spec, tol)
            report.add(Check(
                f"semigroup range in {spec.family.value}", anchor, r.passed,
                tol + r.gap - r.worst_dist,
                params={"alpha": Sm.alpha, "t": t, "dim": Sm.dim, "angles": m},
                witness=r.witness,
                details={"gap": r.gap, "worst_dist": r.worst_dist, "worst_margin": r.worst_margin},
            ))
    return report


@dataclass
class ConverseWitness:
    t: float
    point: complex
    distance: float


def converse_probe(S, alpha: float, ts: Iterable[float], m: int = DEFAULT_ANGLES,
                   min_dist: float = 1e-10) -> ConverseWitness | None:
    """Look for a ``t`` with ``W(exp(-tS))`` leaving Omega(alpha).

    Only runs when the enclosure of ``W(S)`` is not inside the sector. A
    witness is a support point of ``W(exp(-tS))`` (so a genuine member of the
    numerical range) lying more than ``min_dist`` outside Omega. ``None``
    means no witness was found, which proves nothing.
    """
    S = as_cmatrix(S)
    alpha = check_angle(alpha)
    sector = RegionSpec(Family.SECTOR, alpha)
    if hull_in_region(compute_hull(S, m), sector, 1e-8).passed:
        return None
    omega = RegionSpec(Family.OMEGA, alpha)
    from .regions import dist_to_region

    for t in ts:
        hull = compute_hull(matrix_exp(-t * S), m)
        d = dist_to_region(omega, hull.support_points)
        k = int(np.argmax(d))
        if d[k] > min_dist:
            return ConverseWitness(float(t), complex(hull.support_points[k]), float(d[k]))
    return None


def derived_bounds_check(Sm: SectorialMatrix, ts: Iterable[float], tol: float = 1e-9) -> VerifyReport:
    """Real-part floor and imaginary-part ceiling implied by ``W(exp(-tS))`` in Omega.

    For each t: ``lambda_min(Re exp(-tS)) >= -tan^2(a/2)``,
    ``||Im exp(-tS)|| <= omega_max_im(a)`` and the sharper floor
    ``lambda_min(Re exp(-tS)) >= -omega_max_im(a)^2``.
    """
    report = VerifyReport()
    a = Sm.alpha
    floor = -math.tan(0.5 * a) ** 2
    ceiling = omega_max_im(a)
    for t in ts:
        re, im = cartesian_parts(semigroup(Sm, t))
        lam_min = float(np.linalg.eigvalsh(re)[0])
        im_norm = float(np.max(np.abs(np.linalg.eigvalsh(im))))
        params = {"alpha": a, "t": t, "dim": Sm.dim}
        report.add(Check("real part floor", "Re exp(-tS) >= -tan^2(alpha/2) I",
                         lam_min >= floor - tol, lam_min - floor, params=dict(params)))
        report.add(Check("imaginary part ceiling", "||Im exp(-tS)|| <= max |Im z| over Omega(alpha)",
                         im_norm <= ceiling + tol, ceiling - im_norm, params=dict(params)))
        report.add(Check("sharp real part floor", "Re exp(-tS) >= -(max |Im z| over Omega(alpha))^2 I",
                         lam_min >= -ceiling**2 - tol, lam_min + ceiling**2, params=dict(params)))
    return report


def product_inequality_check(factors, alpha: float, tol: float = 1e-9) -> Check:
    """``|sin a sqrt(prod_k (exp(-t_k S_k) u_k, u_k)) +/- i cos a| <= 1``.

    ``factors`` is a sequence of ``(S, t, u)`` with ``S`` a matrix or a
    :class:`SectorialMatrix` and ``u`` a unit vector.
    """
    from .regions import principal_sqrt

    alpha = check_angle(alpha)
    prod = 1.0 + 0.0j
    for S, t, u in factors:
        S = S.S if isinstance(S, SectorialMatrix) else as_cmatrix(S)
        u = np.asarray(u, dtype=np.complex128).reshape(-1)
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError("factor vectors must be unit vectors")
        prod *= complex(np.vdot(u, matrix_exp(-t * S) @ u))
    root = complex(principal_sqrt(prod))
    s, c = math.sin(alpha), math.cos(alpha)
    worst = max(abs(s * root + 1j * c), abs(s * root - 1j * c))
    return Check("product inequality", "|sin(alpha) sqrt(prod (exp(-t_k S_k)u_k, u_k)) +/- i cos(alpha)| <= 1",
                 worst <= 1.0 + tol, 1.0 - worst, params={"alpha": alpha, "factors": len(factors)},
                 witness=prod)


def lens_power_sup(alpha: float, n: int) -> float:
    """``sup |z^n (1 - z)|`` over the lens L(alpha).

    With ``z = 1/(1 + w)`` the lens is the image of the sector, and the
    maximum sits on a boundary ray ``w = x e^{i a}`` at the positive root
    of ``n x^2 + (n - 1) cos(a) x - 1 = 0``.
    """
    c = math.cos(check_angle(alpha))
    x = (-(n - 1) * c + math.sqrt(((n - 1) * c) ** 2 + 4.0 * n)) / (2.0 * n)
    return x / (1.0 + 2.0 * c * x + x * x) ** (0.5 * (n + 1))


@dataclass
class PowerDifferenceReport:
    ns: list
    values: list
    sup: float
    bounds: list = field(default_factory=list)
    passed: bool = True


def power_difference_check(C, ns: Iterable[int], alpha: float | None = None) -> PowerDifferenceReport:
    """Measure ``(n + 1) ||C^n - C^{n+1}||`` over ``ns``.

    With ``alpha`` given, ``C`` is taken to satisfy the lens norm condition
    (as resolvents of alpha-sectorial generators do), and each value is
    compared with ``K_up(a) (n + 1) sup_L |z^n (1 - z)|``. Without it the
    check only requires finite values.
    """
    C = as_cmatrix(C)
    ns = sorted(int(n) for n in ns)
    values, bounds = [], []
    power = np.linalg.matrix_power(C, ns[0]) if ns else None
    current = ns[0] if ns else 0
    for n in ns:
        while current < n:
            power = power @ C
            current += 1
        values.append((n + 1) * operator_norm(power - power @ C))
        if alpha is not None:
            bounds.append(k_upper(alpha) * (n + 1) * lens_power_sup(alpha, n))
    finite = all(math.isfinite(v) for v in values)
    ok = finite and all(v <= b * (1.0 + 1e-9) for v, b in zip(values, bounds))
    return PowerDifferenceReport(ns, values, max(values) if values else 0.0, bounds, ok)


def semca_forward_check(Sm: SectorialMatrix, ts: Iterable[float], ns: Iterable[int],
                        tol: float = 1e-9) -> VerifyReport:
    """Class C_H(alpha) membership of ``exp(-tS)`` and of its Euler approximants."""
    report = VerifyReport()
    ns = list(ns)
    for t in ts:
        cert = class_c_norms(semigroup(Sm, t), Sm.alpha, tol)
        report.add(Check("semigroup in class C", "exp(-tS) in C_H(alpha)", cert.passed, 1.0 - cert.worst,
                         params={"alpha": Sm.alpha, "t": t, "dim": Sm.dim},
                         details={"norm_plus": cert.norm_plus, "norm_minus": cert.norm_minus}))
        worst = 0.0
        for n in ns:
            worst = max(worst, class_c_norms(euler_approx(Sm, t, n), Sm.alpha, tol).worst)
        report.add(Check("Euler approximants in class C", "(I + tS/n)^(-n) in C_H(alpha)",
                         worst <= 1.0 + tol, 1.0 - worst,
                         params={"alpha": Sm.alpha, "t": t, "dim": Sm.dim, "ns": ns}))
    return report


def resolvent_lens_check(Sm: SectorialMatrix, lam: float, m: int = DEFAULT_ANGLES, tol: float = 1e-8) -> VerifyReport:
    """``W(F(lam))`` inside L(alpha) and the lens norm bound for ``F(lam)``."""
    from .sectorial import lens_norms

    report = VerifyReport()
    F = resolvent_contraction(Sm, lam)
    r = hull_in_region(compute_hull(F, m), RegionSpec(Family.LSET, Sm.alpha), tol)
    params = {"alpha": Sm.alpha, "lambda": lam, "dim": Sm.dim}
    report.add(Check("resolvent range in L", "W((I + lambda S)^(-1)) in L(alpha)", r.passed,
                     tol + r.gap - r.worst_dist, params=dict(params), witness=r.witness,
                     details={"gap": r.gap, "worst_dist": r.worst_dist}))
    plus, minus = lens_norms(F, Sm.alpha)
    worst = max(plus, minus)
    report.add(Check("resolvent lens norms", "||(F - I/2) sin(alpha) +/- i cos(alpha)/2 I|| <= 1/2",
                     worst <= 0.5 + 1e-9, 0.5 - worst, params=dict(params)))
    return report
