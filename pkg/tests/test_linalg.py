import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from sectoria.errors import NonHermitianInput, SingularMatrix
from sectoria.linalg import (
    adjoint,
    as_cmatrix,
    cartesian_parts,
    herm_eigen,
    inv_power,
    jacobi_eigh,
    matrix_exp,
    matrix_power,
    operator_norm,
    operator_norms,
    solve,
)
from sectoria.rng import SplitMix64


def cmat(seed, n, scale=1.0):
    return scale * SplitMix64(seed).complex_normal((n, n))


def herm(seed, n):
    X = cmat(seed, n)
    return 0.5 * (X + adjoint(X))


def test_as_cmatrix_rejects_bad_shapes():
    with pytest.raises(ValueError):
        as_cmatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_cmatrix(np.zeros((0, 0)))
    with pytest.raises(ValueError):
        as_cmatrix([[1.0, np.nan], [0.0, 1.0]])
    assert as_cmatrix([[1]]).dtype == np.complex128


def test_cartesian_parts_recombine():
    T = cmat(1, 5)
    re, im = cartesian_parts(T)
    np.testing.assert_allclose(re + 1j * im, T, atol=1e-15)
    np.testing.assert_array_equal(re, adjoint(re))
    np.testing.assert_array_equal(im, adjoint(im))


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_jacobi_agrees_with_lapack(n):
    H = herm(n, n)
    ref = scipy.linalg.eigh(H, eigvals_only=True)
    jac = herm_eigen(H, method="jacobi")
    np.testing.assert_allclose(jac.values, ref, atol=1e-12 * (1 + np.abs(ref).max()))
    np.testing.assert_allclose(jac.reconstruct(), H, atol=1e-12)
    np.testing.assert_allclose(adjoint(jac.vectors) @ jac.vectors, np.eye(n), atol=1e-12)


def test_jacobi_on_diagonal_and_repeated_spectrum():
    H = np.diag([3.0, 1.0, 1.0, -2.0]).astype(complex)
    e = jacobi_eigh(H)
    np.testing.assert_allclose(e.values, [-2, 1, 1, 3])
    U = scipy.linalg.qr(cmat(4, 4))[0]
    e = jacobi_eigh(U @ H @ adjoint(U))
    np.testing.assert_allclose(e.values, [-2, 1, 1, 3], atol=1e-13)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianInput):
        herm_eigen(cmat(3, 3))
    with pytest.raises(ValueError):
        herm_eigen(herm(3, 3), method="qr")


def test_operator_norm_matches_two_norm():
    for seed in range(5):
        T = cmat(seed, 6)
        assert operator_norm(T) == pytest.approx(np.linalg.norm(T, 2), rel=1e-12)
    Ts = np.stack([cmat(s, 4) for s in range(3)])
    np.testing.assert_allclose(operator_norms(Ts), [np.linalg.norm(T, 2) for T in Ts], rtol=1e-12)


def test_solve_and_singular_detection():
    A = cmat(8, 6)
    B = cmat(9, 6)
    np.testing.assert_allclose(A @ solve(A, B), B, atol=1e-12)
    S = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrix):
        solve(S, np.eye(2))
    with pytest.raises(SingularMatrix):
        solve(np.diag([1.0, 1e-16]), np.eye(2))


@pytest.mark.parametrize("scale", [0.0, 1e-3, 0.4, 3.0, 40.0])
def test_matrix_exp_matches_scipy(scale):
    A = cmat(21, 7, scale)
    ref = scipy.linalg.expm(A)
    err = np.linalg.norm(matrix_exp(A) - ref, 2)
    assert err <= 1e-12 * max(1.0, np.linalg.norm(ref, 2))


def test_matrix_exp_of_hermitian_via_eigen():
    H = herm(5, 6)
    w, V = np.linalg.eigh(H)
    ref = (V * np.exp(-w)) @ adjoint(V)
    np.testing.assert_allclose(matrix_exp(-H), ref, atol=1e-12)
    np.testing.assert_array_equal(matrix_exp(np.zeros((3, 3))), np.eye(3))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 40), seed=st.integers(0, 10**6))
def test_matrix_power_binary(n, seed):
    M = cmat(seed, 3, 0.5)
    np.testing.assert_allclose(matrix_power(M, n), np.linalg.matrix_power(M, n), atol=1e-12)


def test_inv_power():
    A = cmat(2, 4, 0.3) + 2 * np.eye(4)
    ref = np.linalg.matrix_power(np.linalg.inv(np.eye(4) + 0.7 * A), 5)
    np.testing.assert_allclose(inv_power(A, 0.7, 5), ref, atol=1e-12)
    np.testing.assert_array_equal(inv_power(A, 0.7, 0), np.eye(4))
    with pytest.raises(ValueError):
        matrix_power(A, -1)
