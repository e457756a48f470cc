import math

import numpy as np
import pytest
import shapely
from hypothesis import assume, given, settings, strategies as st
from scipy.optimize import minimize_scalar
from scipy.spatial import ConvexHull
from shapely.geometry import Point, Polygon

from sectoria.errors import DegenerateAngle
from sectoria.regions import (
    Family,
    RegionSpec,
    boundary_samples,
    containment_check,
    contains,
    dist_to_region,
    margin,
    omega_boundary_point,
    omega_convexity_check,
    omega_curve_derivatives,
    omega_max_im,
    omega_max_im_printed,
    parse_family,
    principal_sqrt,
    sample_region,
    semigroup_closure_check,
)
from sectoria.rng import SplitMix64

ALPHAS = [0.2, 0.6, 1.0, 1.4]
BOUNDED = [Family.CSET, Family.OMEGA, Family.QSET, Family.LSET, Family.DSET, Family.BSET]


def polygon(spec, m=4096):
    pts = boundary_samples(spec, m).points
    return Polygon(np.column_stack([pts.real, pts.imag]))


def test_parse_family_aliases():
    assert parse_family("L") is Family.LSET
    assert parse_family("omega") is Family.OMEGA
    assert parse_family("Q") is Family.QSET
    assert parse_family("disk") is Family.UNIT_DISK
    with pytest.raises(ValueError):
        parse_family("ellipse")


@pytest.mark.parametrize("alpha", [-0.1, math.pi / 2, 2.0, float("nan")])
def test_angle_validation(alpha):
    with pytest.raises(ValueError):
        RegionSpec(Family.CSET, alpha)


def test_principal_sqrt_on_cut():
    assert principal_sqrt(-4.0) == pytest.approx(2j)
    assert principal_sqrt(-4.0 - 0.0j).real >= 0


@pytest.mark.parametrize("alpha", ALPHAS)
def test_known_boundary_points(alpha):
    s, c, h = math.sin(alpha), math.cos(alpha), math.tan(alpha / 2)
    on_boundary = {
        Family.CSET: [1.0, -1.0, 1j * h, -1j * h],
        Family.OMEGA: [1.0, -h * h],
        Family.LSET: [0.0, 1.0],
        Family.DSET: [1j * s, -s, 1.0],
        Family.QSET: [1.0],
        Family.SECTOR: [2.0 * np.exp(1j * alpha), 0.5 * np.exp(-1j * alpha)],
        Family.UNIT_DISK: [1j, -1.0],
    }
    for fam, pts in on_boundary.items():
        m = margin(RegionSpec(fam, alpha), np.array(pts))
        np.testing.assert_allclose(m, 0.0, atol=1e-12, err_msg=str(fam))
    assert contains(RegionSpec(Family.OMEGA, alpha), 0.0)
    assert not contains(RegionSpec(Family.CSET, alpha), 1.01)
    # D contains i sin(alpha) but C does not
    assert margin(RegionSpec(Family.CSET, alpha), 1j * s) < 0


@pytest.mark.parametrize("fam", BOUNDED)
@pytest.mark.parametrize("alpha", ALPHAS)
def test_boundary_samples_lie_on_boundary(fam, alpha):
    b = boundary_samples(RegionSpec(fam, alpha), 512)
    assert b.points[0] == b.points[-1]
    np.testing.assert_allclose(margin(b.spec, b.points), 0.0, atol=1e-12)
    assert polygon(b.spec, 512).exterior.is_ccw


def test_degenerate_regions_are_segments():
    for fam, (lo, hi) in {Family.CSET: (-1, 1), Family.LSET: (0, 1), Family.DSET: (0, 1)}.items():
        spec = RegionSpec(fam, 0.0)
        pts = boundary_samples(spec, 16).points
        assert pts.real.min() == lo and pts.real.max() == hi and np.all(pts.imag == 0)
        assert contains(spec, 0.5 * (lo + hi))
        assert dist_to_region(spec, hi + 1 + 1j) == pytest.approx(math.sqrt(2))
    with pytest.raises(DegenerateAngle):
        omega_boundary_point(0.0, 1.0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_inclusion_chain_against_shapely(alpha):
    chain = [Family.LSET, Family.OMEGA, Family.QSET, Family.DSET]
    polys = [polygon(RegionSpec(f, alpha)) for f in chain]
    for inner, outer in zip(polys, polys[1:]):
        assert inner.within(outer.buffer(1e-6))
    for inner, outer in zip(chain, chain[1:]):
        r = containment_check(RegionSpec(inner, alpha), RegionSpec(outer, alpha))
        assert r.passed and r.worst_dist <= 1e-8
    r = containment_check(RegionSpec(Family.DSET, alpha), RegionSpec(Family.CSET, alpha))
    assert not r.passed
    assert abs(r.witness.imag) == pytest.approx(math.sin(alpha), rel=1e-2)


@pytest.mark.parametrize("fam", [Family.OMEGA, Family.DSET, Family.LSET, Family.CSET])
@pytest.mark.parametrize("alpha", [0.3, 1.2])
def test_distance_matches_shapely(fam, alpha):
    spec = RegionSpec(fam, alpha)
    poly = polygon(spec, 8192)
    rng = SplitMix64(17)
    z = 3.0 * (rng.uniform(300) - 0.5) + 3.0j * (rng.uniform(300) - 0.5)
    d = dist_to_region(spec, z)
    ref = np.array([poly.distance(Point(w.real, w.imag)) for w in z])
    # the sampled polygon is inscribed, so shapely can overestimate by its sagitta
    assert np.all(d <= ref + 1e-9)
    np.testing.assert_allclose(d, ref, atol=2e-6)


def test_sector_and_disk_distances_exact():
    spec = RegionSpec(Family.SECTOR, 0.5)
    assert dist_to_region(spec, 2j) == pytest.approx(2.0 * math.sin(math.pi / 2 - 0.5))
    assert dist_to_region(spec, -3.0) == pytest.approx(3.0)
    assert dist_to_region(RegionSpec(Family.UNIT_DISK), 3 + 4j) == pytest.approx(4.0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_omega_curve_derivatives_by_finite_differences(alpha):
    t = np.linspace(math.pi / 2 - alpha, math.pi / 2 + alpha, 25)
    h = 1e-5
    d1, d2 = omega_curve_derivatives(alpha, t)
    f = lambda x: omega_boundary_point(alpha, x)
    fd1 = (f(t + h) - f(t - h)) / (2 * h)
    fd2 = (f(t + h) - 2 * f(t) + f(t - h)) / h**2
    scale = 1.0 / math.sin(alpha) ** 2
    np.testing.assert_allclose(d1, fd1, atol=1e-8 * scale)
    np.testing.assert_allclose(d2, fd2, atol=1e-4 * scale)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_omega_is_convex(alpha):
    r = omega_convexity_check(alpha, 1000)
    assert r.passed and r.min_curvature_numerator > 0
    assert r.min_re >= -math.tan(alpha / 2) ** 2 - 1e-12
    pts = boundary_samples(RegionSpec(Family.OMEGA, alpha), 400).points[:-1]
    hull = ConvexHull(np.column_stack([pts.real, pts.imag]))
    assert len(hull.vertices) == len(pts)
    with pytest.raises(DegenerateAngle):
        omega_convexity_check(0.0)


@pytest.mark.parametrize("alpha", ALPHAS + [0.01, 1.56])
def test_omega_max_im_against_optimiser(alpha):
    neg_im = lambda t: -omega_boundary_point(alpha, t).imag
    res = minimize_scalar(neg_im, bounds=(math.pi / 2 - alpha, math.pi / 2), method="bounded",
                          options={"xatol": 1e-12})
    assert omega_max_im(alpha) == pytest.approx(-res.fun, rel=1e-9, abs=1e-12)
    assert omega_max_im(alpha) < math.tan(alpha / 2)


def test_omega_max_im_frozen_values():
    # from a 1e6-point boundary grid maximum, refined by a bounded optimiser
    frozen = {0.2: 0.07749656162631552, 0.6: 0.24564165096068102,
              1.0: 0.46100032449028094, 1.4: 0.7901408645749766}
    for a, v in frozen.items():
        assert omega_max_im(a) == pytest.approx(v, rel=1e-12)
    assert omega_max_im(0.0) == 0.0


def test_printed_variant_disagrees_with_the_curve():
    # the variant with sin(g) in the second term does not give the maximum
    for a in ALPHAS:
        assert abs(omega_max_im_printed(a) - omega_max_im(a)) > 1e-2


@pytest.mark.parametrize("fam", [Family.CSET, Family.OMEGA, Family.QSET, Family.BSET])
@pytest.mark.parametrize("alpha", ALPHAS + [0.0])
def test_multiplicative_closure(fam, alpha):
    r = semigroup_closure_check(RegionSpec(fam, alpha), trials=4000, seed=3)
    assert r.passed and r.violations == 0


@pytest.mark.parametrize("alpha", ALPHAS)
def test_ideal_property(alpha):
    r = semigroup_closure_check(RegionSpec(Family.BSET, alpha), 4000, 5, factor=RegionSpec(Family.CSET, alpha))
    assert r.passed


def test_closure_rejects_non_semigroups():
    with pytest.raises(ValueError):
        semigroup_closure_check(RegionSpec(Family.DSET, 0.5))
    with pytest.raises(ValueError):
        semigroup_closure_check(RegionSpec(Family.BSET, 0.5), factor=RegionSpec(Family.CSET, 0.4))


def test_closure_detects_a_non_closed_set():
    # L(alpha) is not closed under products: 1/2 + i y times itself leaves it
    spec = RegionSpec(Family.LSET, 1.0)
    z = sample_region(spec, 20000, SplitMix64(1))
    assert np.any(margin(spec, z * z[::-1]) < -1e-6)


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.05, 1.5), x1=st.floats(-1, 1), y1=st.floats(-1, 1), x2=st.floats(-1, 1),
       y2=st.floats(-1, 1))
def test_product_of_omega_points_stays_in_omega(alpha, x1, y1, x2, y2):
    spec = RegionSpec(Family.OMEGA, alpha)
    z, w = complex(x1, y1), complex(x2, y2)
    assume(contains(spec, z, 0.0) and contains(spec, w, 0.0))
    assert margin(spec, z * w) >= -1e-12


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.05, 1.5), r=st.floats(0, 1), phi=st.floats(-math.pi, math.pi))
def test_cset_is_sector_image(alpha, r, phi):
    # z in C(alpha) iff (1 - z)/(1 + z) lies in the sector
    z = r * complex(math.cos(phi), math.sin(phi))
    assume(abs(1 + z) > 1e-6)
    w = (1 - z) / (1 + z)
    in_c = margin(RegionSpec(Family.CSET, alpha), z)
    in_s = margin(RegionSpec(Family.SECTOR, alpha), w)
    assume(abs(in_c) > 1e-9 and abs(in_s) > 1e-9)
    assert (in_c > 0) == (in_s > 0)
