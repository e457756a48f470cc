import math

import numpy as np
import pytest

from sectoria.errors import CertificationFailure, DegenerateAngle, SingularMatrix
from sectoria.rng import SplitMix64, stream
from sectoria.sectorial import (
    SectorialMatrix,
    cayley,
    class_c_norms,
    class_c_vector_criterion,
    even_power_range_check,
    inverse_cayley,
    lens_norms,
    random_sectorial,
    resolvent_contraction,
    symmetrized_product,
)

CASES = [(d, a) for d in (1, 2, 4, 8, 16) for a in (0.0, 0.2, 0.6, 1.0, 1.4, 1.56)]


def sector_slack(S, alpha):
    """Largest eigenvalue of Re(e^{-i theta} S) on the two sector edges (<= 0 inside)."""
    worst = -np.inf
    for theta in (math.pi / 2 + alpha, -(math.pi / 2 + alpha)):
        R = np.exp(-1j * theta) * S
        worst = max(worst, np.linalg.eigvalsh(0.5 * (R + R.conj().T))[-1])
    return worst


def unit_vectors(seed, n, count):
    v = SplitMix64(seed).complex_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@pytest.mark.parametrize("dim,alpha", CASES)
def test_random_sectorial_lies_in_sector(dim, alpha):
    Sm = random_sectorial(dim, alpha, seed=dim * 100 + int(alpha * 100))
    assert Sm.dim == dim and Sm.alpha == alpha
    assert np.linalg.norm(Sm.S, 2) == pytest.approx(1.0, rel=1e-12)
    assert sector_slack(Sm.S, alpha) <= 1e-12
    x = unit_vectors(dim, dim, 2000)
    q = np.einsum("ki,ij,kj->k", x.conj(), Sm.S, x)
    assert np.all(np.abs(np.angle(q)) <= alpha + 1e-9)
    # accretive with a strictly positive real part
    assert np.linalg.eigvalsh(0.5 * (Sm.S + Sm.S.conj().T))[0] > 0


def test_random_sectorial_is_deterministic():
    a, b = random_sectorial(4, 0.6, 12), random_sectorial(4, 0.6, 12)
    np.testing.assert_array_equal(a.S, b.S)
    assert not np.array_equal(a.S, random_sectorial(4, 0.6, 13).S)


def test_certify_rejects_matrix_outside_sector():
    with pytest.raises(CertificationFailure):
        SectorialMatrix.certify(np.diag([1.0, 1j]), 0.5)
    with pytest.raises(ValueError):
        random_sectorial(0, 0.5, 1)


@pytest.mark.parametrize("dim,alpha", CASES)
def test_cayley_transform_lands_in_class_c(dim, alpha):
    Sm = random_sectorial(dim, alpha, seed=7 + dim)
    T = cayley(Sm.S)
    cert = class_c_norms(T, alpha)
    s, c = math.sin(alpha), math.cos(alpha)
    I = np.eye(dim)
    assert cert.norm_plus == pytest.approx(np.linalg.norm(s * T + 1j * c * I, 2), rel=1e-12)
    assert cert.norm_minus == pytest.approx(np.linalg.norm(s * T - 1j * c * I, 2), rel=1e-12)
    assert cert.passed and cert.worst <= 1 + 1e-9
    np.testing.assert_allclose(inverse_cayley(T), Sm.S, atol=1e-10)
    if alpha > 0:
        for f in unit_vectors(dim + 1, dim, 50):
            assert class_c_vector_criterion(T, alpha, f) >= -1e-12


def test_class_c_at_zero_needs_hermitian_contraction():
    H = np.diag([0.5, -0.3]).astype(complex)
    assert class_c_norms(H, 0.0).passed
    N = np.array([[0.0, 0.5], [0.0, 0.0]])
    assert not class_c_norms(N, 0.0).passed
    assert not class_c_norms(3 * H, 0.0).passed
    with pytest.raises(DegenerateAngle):
        class_c_vector_criterion(H, 0.0, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        class_c_vector_criterion(H, 0.3, np.array([1.0, 1.0]))


def test_class_c_rejects_rotation_outside():
    # a unitary with eigenvalue i is not in C(alpha) for alpha < pi/2
    assert not class_c_norms(np.diag([1j, 1.0]), 1.0).passed


def test_cayley_of_minus_identity_is_singular():
    with pytest.raises(SingularMatrix):
        cayley(-np.eye(3))


@pytest.mark.parametrize("alpha", [0.2, 1.0, 1.4])
@pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
def test_resolvent_lens_norms(alpha, lam):
    Sm = random_sectorial(6, alpha, seed=3)
    F = resolvent_contraction(Sm, lam)
    np.testing.assert_allclose(F @ (np.eye(6) + lam * Sm.S), np.eye(6), atol=1e-12)
    plus, minus = lens_norms(F, alpha)
    assert max(plus, minus) <= 0.5 + 1e-9
    with pytest.raises(ValueError):
        resolvent_contraction(Sm, -1.0)


@pytest.mark.parametrize("alpha", [0.2, 0.6, 1.0, 1.4])
def test_even_powers_of_class_members_in_omega(alpha):
    T = cayley(random_sectorial(5, alpha, seed=11).S)
    for n in (1, 2, 5):
        assert even_power_range_check(T, alpha, n, m=360).passed
    with pytest.raises(ValueError):
        even_power_range_check(T, alpha, 0)


def test_symmetrized_product():
    A, B = SplitMix64(1).complex_normal((3, 3)), SplitMix64(2).complex_normal((3, 3))
    np.testing.assert_allclose(symmetrized_product(A, B), symmetrized_product(B, A))
    np.testing.assert_allclose(symmetrized_product(A, A), A @ A)
    with pytest.raises(ValueError):
        symmetrized_product(A, np.eye(2))
