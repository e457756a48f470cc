"""Dense complex linear algebra for small operators.

Matrices are plain ``numpy`` complex128 arrays of shape (n, n). Everything
here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import warnings

import numpy as np
import scipy.linalg

from .errors import NonHermitianInput, SingularMatrix

PIVOT_RTOL = 1e-14
HERMITIAN_RTOL = 1e-10
JACOBI_RTOL = 1e-14
EXPM_SCALE_TARGET = 0.5

# Diagonal [13/13] Pade coefficients for exp.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)


def as_cmatrix(A, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a square, finite complex128 array."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def adjoint(T: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(T, -1, -2))


def cartesian_parts(T) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Re T, Im T)`` with ``Re T = (T + T*)/2`` and ``Im T = (T - T*)/2i``.

    Both parts are Hermitian and ``T = Re T + i Im T``.
    """
    T = as_cmatrix(T)
    Ts = adjoint(T)
    re = 0.5 * (T + Ts)
    im = -0.5j * (T - Ts)
    # exact symmetrisation of rounding noise
    return 0.5 * (re + adjoint(re)), 0.5 * (im + adjoint(im))


@dataclass(frozen=True)
class HermEigen:
    """Eigenvalues in ascending order and eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.vectors
        return (V * self.values) @ adjoint(V)


def _check_hermitian(H: np.ndarray) -> None:
    scale = 1.0 + np.linalg.norm(H, 2)
    if np.linalg.norm(H - adjoint(H), 2) > HERMITIAN_RTOL * scale:
        raise NonHermitianInput("matrix is not Hermitian within 1e-10*(1+||H||)")


def jacobi_eigh(H: np.ndarray, max_sweeps: int = 60) -> HermEigen:
    """Cyclic complex Jacobi eigensolver.

    Each rotation first removes the phase of ``H[p, q]`` with a diagonal
    unitary and then applies the real symmetric Jacobi rotation. Sweeps stop
    once the off-diagonal Frobenius mass drops below ``1e-14 * ||H||_F``.
    """
    A = np.array(H, dtype=np.complex128)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    A = 0.5 * (A + adjoint(A))
    target = JACOBI_RTOL * np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(A) ** 2 - np.sum(np.abs(np.diag(A)) ** 2), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                U = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = adjoint(U) @ A[idx, :]
                V[:, idx] = V[:, idx] @ U
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    values = np.diag(A).real.copy()
    order = np.argsort(values, kind="stable")
    return HermEigen(values[order], V[:, order])


def herm_eigen(H, method: str = "lapack") -> HermEigen:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    H : array_like
        Square matrix with ``||H - H*|| <= 1e-10 (1 + ||H||)``.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"jacobi"`` runs the
        cyclic Jacobi sweeps in :func:`jacobi_eigh`.

    Raises
    ------
    NonHermitianInput
        If ``H`` is not Hermitian within tolerance.
    """
    H = as_cmatrix(H)
    _check_hermitian(H)
    if method == "jacobi":
        return jacobi_eigh(H)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    w, V = np.linalg.eigh(0.5 * (H + adjoint(H)))
    return HermEigen(w, V)


def top_eigenpairs(Hs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector for a stack of Hermitian matrices."""
    w, V = np.linalg.eigh(Hs)
    return w[..., -1], V[..., :, -1]


def operator_norm(T) -> float:
    """Spectral norm ``sqrt(lambda_max(T* T))``."""
    T = as_cmatrix(T)
    lam = np.linalg.eigvalsh(adjoint(T) @ T)[-1]
    return float(math.sqrt(max(lam, 0.0)))


def operator_norms(Ts: np.ndarray) -> np.ndarray:
    """Spectral norms for a stack of square matrices."""
    lam = np.linalg.eigvalsh(adjoint(Ts) @ Ts)[..., -1]
    return np.sqrt(np.maximum(lam, 0.0))


def solve(A, B) -> np.ndarray:
    """Solve ``A X = B`` by LU with partial pivoting.

    Raises
    ------
    SingularMatrix
        When a pivot magnitude is below ``1e-14 * ||A||_1``.
    """
    A = as_cmatrix(A, "A")
    B = np.asarray(B, dtype=np.complex128)
    if B.shape[0] != A.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, B has {B.shape[0]} rows")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    scale = np.abs(A).sum(axis=0).max()
    if np.abs(np.diag(lu)).min() < PIVOT_RTOL * scale or scale == 0.0:
        raise SingularMatrix("pivot below 1e-14*||A||")
    return scipy.linalg.lu_solve((lu, piv), B, check_finite=False)


def _pade13(A: np.ndarray) -> np.ndarray:
    b = _PADE13
    n = A.shape[0]
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    return solve(V - U, V + U)


def matrix_exp(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with the [13/13] Pade approximant.

    The argument is scaled by ``2**-s`` until its 1-norm is at most 0.5,
    then the approximant is squared ``s`` times.
    """
    A = as_cmatrix(A)
    norm1 = np.abs(A).sum(axis=0).max()
    if norm1 == 0.0:
        return np.eye(A.shape[0], dtype=np.complex128)
    s = 0
    if norm1 > EXPM_SCALE_TARGET:
        s = int(math.ceil(math.log2(norm1 / EXPM_SCALE_TARGET)))
    R = _pade13(A / 2.0**s)
    for _ in range(s):
        R = R @ R
    return R


def matrix_power(M: np.ndarray, n: int) -> np.ndarray:
    """``M**n`` by binary powering; ``n = 0`` gives the identity."""
    if n < 0:
        raise ValueError("n must be non-negative")
    result = np.eye(M.shape[0], dtype=np.complex128)
    base = np.array(M, dtype=np.complex128)
    while n:
        if n & 1:
            result = result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


def inv_power(A, c: float, n: int) -> np.ndarray:
    """``(I + c A)^(-n)``: one LU solve for the resolvent, then binary powering."""
    A = as_cmatrix(A)
    if n == 0:
        return np.eye(A.shape[0], dtype=np.complex128)
    ident = np.eye(A.shape[0], dtype=np.complex128)
    M = solve(ident + c * A, ident)
    return matrix_power(M, n)
