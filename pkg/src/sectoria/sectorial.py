"""Sectorial generators and the contraction class C_H(alpha).

A matrix ``S`` is alpha-sectorial when ``W(S)`` lies in the sector
``|arg z| <= alpha``. A contraction ``T`` is in class C_H(alpha) when
``||T sin a +/- i cos a I|| <= 1``; Cayley transforms map one set onto the
other.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import CertificationFailure, DegenerateAngle
from .linalg import (
    adjoint,
    as_cmatrix,
    cartesian_parts,
    herm_eigen,
    matrix_power,
    operator_norm,
    solve,
)
from .numrange import DEFAULT_ANGLES, HullContainmentReport, compute_hull, hull_in_region
from .regions import Family, RegionSpec, check_angle
from .rng import SplitMix64

CLASS_TOL = 1e-9
SECTOR_TOL = 1e-8
REGULARIZATION = 1e-3


@dataclass(frozen=True)
class SectorialMatrix:
    """A matrix together with its semi-angle and numerical-range certificate.

    ``cert`` is the smallest angular slack ``alpha - |arg z|`` over the outer
    polygon of ``W(S)``; ``cert_dist`` is the largest distance of that polygon
    from the sector.
    """

    S: np.ndarray
    alpha: float
    cert: float
    cert_dist: float

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    @classmethod
    def certify(cls, S, alpha: float, m: int = DEFAULT_ANGLES, tol: float = SECTOR_TOL) -> "SectorialMatrix":
        """Wrap ``S`` after checking ``W(S)`` against the sector of semi-angle ``alpha``.

        Raises
        ------
        CertificationFailure
            If the enclosure of ``W(S)`` leaves the sector by more than
            ``tol`` plus the hull gap.
        """
        S = as_cmatrix(S, "S")
        alpha = check_angle(alpha)
        report = sector_report(S, alpha, m, tol)
        if not report.passed:
            raise CertificationFailure(
                f"W(S) leaves the sector of semi-angle {alpha}: distance {report.worst_dist:.3e} "
                f"exceeds {tol:.1e} + gap {report.gap:.3e}"
            )
        return cls(S, alpha, report.worst_margin, report.worst_dist)


def sector_report(S, alpha: float, m: int = DEFAULT_ANGLES, tol: float = SECTOR_TOL) -> HullContainmentReport:
    return hull_in_region(compute_hull(S, m), RegionSpec(Family.SECTOR, alpha), tol)


def _sqrtm_psd(H: np.ndarray) -> np.ndarray:
    eig = herm_eigen(H)
    root = np.sqrt(np.maximum(eig.values, 0.0))
    return (eig.vectors * root) @ adjoint(eig.vectors)


def random_sectorial(dim: int, alpha: float, seed: int) -> SectorialMatrix:
    """Random alpha-sectorial matrix with an a-priori sector proof.

    ``S = H + i tan(a) H^{1/2} R H^{1/2}`` where ``H = G*G + eps I``
    (``eps = 1e-3 ||G*G||``) and ``R`` is Hermitian with ``||R|| = rho < 1``.
    Then ``|Im(Sx, x)| <= tan(a) Re(Sx, x)`` for every x. ``S`` is finally
    rescaled to unit operator norm, which keeps ``||tS||`` of order ``t``.
    The result is still checked numerically before it is returned.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    alpha = check_angle(alpha)
    rng = SplitMix64(seed)
    G = rng.complex_normal((dim, dim)) / math.sqrt(dim)
    GG = adjoint(G) @ G
    GG = 0.5 * (GG + adjoint(GG))
    H = GG + REGULARIZATION * operator_norm(GG) * np.eye(dim)
    X = rng.complex_normal((dim, dim))
    R = 0.5 * (X + adjoint(X))
    rho = float(rng.uniform(1)[0])
    rnorm = operator_norm(R)
    R = rho * R / rnorm if rnorm > 0 else np.zeros_like(R)
    Hh = _sqrtm_psd(H)
    S = H + 1j * math.tan(alpha) * (Hh @ R @ Hh)
    S = S / operator_norm(S)
    return SectorialMatrix.certify(S, alpha)


@dataclass(frozen=True)
class ClassCCert:
    """Norms ``||T sin a + i cos a I||`` and ``||T sin a - i cos a I||``.

    At ``alpha = 0`` both norms are identically 1, so membership there also
    requires ``T`` to be a Hermitian contraction.
    """

    alpha: float
    norm_plus: float
    norm_minus: float
    passed: bool

    @property
    def worst(self) -> float:
        return max(self.norm_plus, self.norm_minus)


def class_c_norms(T, alpha: float, tol: float = CLASS_TOL) -> ClassCCert:
    T = as_cmatrix(T)
    alpha = check_angle(alpha)
    s, c = math.sin(alpha), math.cos(alpha)
    ident = np.eye(T.shape[0])
    plus = operator_norm(s * T + 1j * c * ident)
    minus = operator_norm(s * T - 1j * c * ident)
    passed = max(plus, minus) <= 1.0 + tol
    if alpha == 0.0:
        norm = operator_norm(T)
        passed = passed and norm <= 1.0 + tol and operator_norm(cartesian_parts(T)[1]) <= tol * (1.0 + norm)
    return ClassCCert(alpha, plus, minus, bool(passed))


def class_c_vector_criterion(T, alpha: float, f) -> float:
    """Slack ``tan(a) (|f|^2 - |Tf|^2) - 2 |Im(Tf, f)|`` for a unit vector f."""
    T = as_cmatrix(T)
    alpha = check_angle(alpha)
    if alpha == 0.0:
        raise DegenerateAngle("the vector criterion degenerates at alpha = 0")
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    if abs(np.linalg.norm(f) - 1.0) > 1e-12:
        raise ValueError("f must be a unit vector")
    Tf = T @ f
    return float(math.tan(alpha) * (1.0 - np.vdot(Tf, Tf).real) - 2.0 * abs(np.vdot(f, Tf).imag))


def cayley(S) -> np.ndarray:
    """``(I - S)(I + S)^{-1}``."""
    S = as_cmatrix(S)
    ident = np.eye(S.shape[0], dtype=np.complex128)
    # (I + S)^{-1} commutes with I - S
    return solve(ident + S, ident - S)


def inverse_cayley(T) -> np.ndarray:
    """``(I - T)(I + T)^{-1}``; raises SingularMatrix when ``I + T`` is singular."""
    return cayley(T)


def resolvent_contraction(Sm: SectorialMatrix, lam: float) -> np.ndarray:
    """``F(lam) = (I + lam S)^{-1}``."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    ident = np.eye(Sm.dim, dtype=np.complex128)
    return solve(ident + lam * Sm.S, ident)


def lens_norms(F, alpha: float) -> tuple[float, float]:
    """``||(F - I/2) sin a +/- i (cos a / 2) I||``; at most 1/2 for resolvents."""
    F = as_cmatrix(F)
    s, c = math.sin(alpha), math.cos(alpha)
    ident = np.eye(F.shape[0])
    G = (F - 0.5 * ident) * s
    return operator_norm(G + 0.5j * c * ident), operator_norm(G - 0.5j * c * ident)


def symmetrized_product(T1, T2) -> np.ndarray:
    T1, T2 = as_cmatrix(T1, "T1"), as_cmatrix(T2, "T2")
    if T1.shape != T2.shape:
        raise ValueError("factors must have the same dimension")
    return 0.5 * (T1 @ T2 + T2 @ T1)


@dataclass
class EvenPowerReport:
    alpha: float
    n: int
    containment: HullContainmentReport

    @property
    def passed(self) -> bool:
        return self.containment.passed


def even_power_range_check(T, alpha: float, n: int, m: int = DEFAULT_ANGLES, tol: float = 1e-7) -> EvenPowerReport:
    """Check ``W(T^{2n})`` inside Omega(alpha) for a class member ``T``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    T = as_cmatrix(T)
    P = matrix_power(T, 2 * n)
    report = hull_in_region(compute_hull(P, m), RegionSpec(Family.OMEGA, alpha), tol)
    return EvenPowerReport(alpha, n, report)
