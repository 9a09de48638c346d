import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitmaps import measures as M
from slitmaps.cauchy import (CircleMeasure, PickNevanlinnaData, TransformGrid, TransformKind,
                             cauchy_transform, check_f_transform, f_transform,
                             herglotz_caratheodory, pick_nevanlinna, stieltjes_invert)
from slitmaps.errors import ExtrapolationError, PoleProximityError, ProximityError

TWO_POINT = M.atomic([-1.0, 1.0], [0.5, 0.5])
RNG = np.random.default_rng(20261015)


def upper_points(n, rng=RNG, scale=3.0):
    return rng.uniform(-scale, scale, n) + 1j * rng.uniform(0.05, scale, n)


def sqrt_z2(z, c):
    r = np.sqrt(z * z - c + 0j)
    return np.where(r.imag < 0, -r, r)


def test_cauchy_examples():
    z = upper_points(20)
    np.testing.assert_allclose(cauchy_transform(M.point_mass(0.0), z), 1 / z, rtol=1e-14)
    np.testing.assert_allclose(cauchy_transform(TWO_POINT, z), z / (z * z - 1), rtol=1e-13)
    assert cauchy_transform(M.semicircle(), 2j) == pytest.approx(-0.41421356237309505j, abs=1e-10)


def test_semicircle_and_arcsine_closed_forms():
    z = upper_points(30)
    semi = (z - sqrt_z2(z, 4)) / 2
    np.testing.assert_allclose(cauchy_transform(M.semicircle(), z), semi, atol=1e-9)
    np.testing.assert_allclose(f_transform(M.arcsine(), z), sqrt_z2(z, 4), atol=1e-8)


def test_near_axis_accuracy():
    x = np.linspace(-1.9, 1.9, 9)
    for y in (1e-3, 1e-6, 1e-10):
        z = x + 1j * y
        np.testing.assert_allclose(cauchy_transform(M.semicircle(), z),
                                   (z - sqrt_z2(z, 4)) / 2, atol=1e-8)


def test_f_transform_examples():
    z = upper_points(10)
    np.testing.assert_allclose(f_transform(M.point_mass(0.0), z), z, rtol=1e-14)
    w = 0.5j + np.sqrt(3) / 2
    assert f_transform(TWO_POINT, w) == pytest.approx(1j, abs=1e-14)


def test_proximity_errors():
    with pytest.raises(ProximityError):
        cauchy_transform(TWO_POINT, 1.0)
    with pytest.raises(ProximityError):
        cauchy_transform(M.semicircle(), 0.5)
    assert cauchy_transform(M.semicircle(), 3.0) == pytest.approx((3 - np.sqrt(5)) / 2)
    with pytest.raises(PoleProximityError):
        f_transform(TWO_POINT, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_mapping_property_and_normalisation(n_atoms, seed):
    rng = np.random.default_rng(seed)
    mu = M.atomic(np.sort(rng.uniform(-3, 3, n_atoms)) + np.arange(n_atoms) * 1e-3,
                  rng.dirichlet(np.ones(n_atoms)))
    z = upper_points(50, rng)
    assert np.all(f_transform(mu, z).imag >= z.imag - 1e-9)
    bound = np.max(np.abs(mu.positions)) ** 2 + 1
    for y in (10.0, 100.0, 1000.0):
        assert abs(f_transform(mu, 1j * y) / (1j * y) - 1) <= bound / y


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_inversion_roundtrip_atomic(n_atoms, seed):
    rng = np.random.default_rng(seed)
    pos = np.sort(rng.choice(np.arange(-12, 13), n_atoms, replace=False) * 0.25
                  + rng.uniform(-0.05, 0.05, n_atoms))
    w = rng.dirichlet(np.ones(n_atoms)) * 0.9 + 0.1 / n_atoms
    mu = M.atomic(pos, w)
    inv = stieltjes_invert(mu, np.linspace(-4, 4, 321))
    found = inv.atom_array()
    assert found.shape == (n_atoms, 2)
    np.testing.assert_allclose(found[:, 0], pos, atol=1e-6)
    np.testing.assert_allclose(found[:, 1], w, atol=1e-6)


def test_inversion_examples():
    x = np.linspace(-1.5, 1.5, 31)
    inv = stieltjes_invert(lambda z: 1 / z, x)
    np.testing.assert_allclose(inv.atom_array(), [[0.0, 1.0]], atol=1e-8)
    np.testing.assert_allclose(inv.density[np.abs(x) > 0.3], 0.0, atol=1e-8)

    inv = stieltjes_invert(lambda z: 1 / sqrt_z2(z, 4), np.array([-1.0, 0.0, 1.0]))
    assert inv.density[1] == pytest.approx(1 / (2 * np.pi), abs=1e-5)
    assert inv.atoms == []

    inv = stieltjes_invert(TWO_POINT, np.linspace(-2, 2, 81))
    np.testing.assert_allclose(inv.atom_array(), [[-1, 0.5], [1, 0.5]], atol=1e-8)


def test_arcsine_endpoint_blowup_is_not_an_atom():
    inv = stieltjes_invert(M.arcsine(), np.linspace(-2.5, 2.5, 101))
    assert inv.atoms == []
    mid = np.abs(inv.x) < 1.5
    np.testing.assert_allclose(inv.density[mid], 1 / (np.pi * np.sqrt(4 - inv.x[mid] ** 2)),
                               atol=1e-3)


def test_inversion_rejects_bad_schedule():
    with pytest.raises(ExtrapolationError):
        stieltjes_invert(TWO_POINT, np.linspace(-2, 2, 5), eps_schedule=(1e-3, 1e-2))


def test_transform_grid_validation():
    with pytest.raises(ValueError):
        TransformGrid([1j, 2j], [1.0])
    with pytest.raises(ValueError):
        TransformGrid([-1j], [1.0])
    with pytest.raises(ValueError):
        TransformGrid([1.5], [1.0], TransformKind.CARATHEODORY)


def _ray_and_box(func):
    pts = np.concatenate([1j * np.array([1.0, 10.0, 100.0, 1000.0]),
                          3 * np.exp(1j * np.linspace(0.1, np.pi - 0.1, 40)),
                          upper_points(40)])
    return TransformGrid.sample(func, pts)


def test_check_f_transform_examples():
    assert check_f_transform(_ray_and_box(lambda z: z - 1 / z)).status == "plausible"
    v = check_f_transform(_ray_and_box(lambda z: z * z))
    assert v.status == "rejected" and v.witness["F"].imag < 0
    rho = M.atomic([-1.0, 2.0], [0.3, 0.2])
    data = PickNevanlinnaData(0.4, rho)
    assert check_f_transform(_ray_and_box(lambda z: pick_nevanlinna(data, z))).status \
        == "plausible"
    few = TransformGrid.sample(lambda z: z, [1j, 2j])
    assert check_f_transform(few).status == "inconclusive"


def test_herglotz_examples():
    z = 0.9 * RNG.uniform(0, 1, 20) ** 0.5 * np.exp(2j * np.pi * RNG.uniform(0, 1, 20))
    np.testing.assert_allclose(herglotz_caratheodory(CircleMeasure.uniform(), z), 1.0,
                               atol=1e-12)
    u = np.exp(0.7j)
    np.testing.assert_allclose(herglotz_caratheodory(CircleMeasure.from_points([u]), z),
                               (u + z) / (u - z), rtol=1e-14)
    pair = CircleMeasure.from_points([1j, -1j])
    np.testing.assert_allclose(herglotz_caratheodory(pair, z), (1 - z * z) / (1 + z * z),
                               rtol=1e-13)


def test_herglotz_positivity_random():
    rng = np.random.default_rng(7)
    for _ in range(1000 // 50):
        k = rng.integers(1, 6)
        mu = CircleMeasure(rng.uniform(0, 2 * np.pi, k), rng.dirichlet(np.ones(k)))
        z = 0.999 * np.sqrt(rng.uniform(0, 1, 50)) * np.exp(2j * np.pi * rng.uniform(0, 1, 50))
        assert np.all(herglotz_caratheodory(mu, z).real > 0)
        assert herglotz_caratheodory(mu, 0.0) == pytest.approx(1.0, abs=1e-12)
