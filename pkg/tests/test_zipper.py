import numpy as np
import pytest

from slitmaps import measures as M
from slitmaps.cauchy import f_transform
from slitmaps.errors import DomainError, GeometryError
from slitmaps.loewner import DrivingFunction, DrivingMode, Interpolation
from slitmaps.zipper import (CapacityRecord, CayleyDirection, SlitPolyline, capacity_coefficient,
                             cayley, decode_driving, encode_slit, hausdorff, random_slit,
                             slit_map_from_driving, slit_to_measure)

VERTICAL = SlitPolyline.vertical(0.0, 2.0)


def chordal_constant(value, total_c, n=200):
    t = np.linspace(0.0, total_c, n + 1)
    return DrivingFunction(t, np.full(t.size, float(value)), DrivingMode.CHORDAL,
                           Interpolation.CONSTANT)


def test_polyline_validation():
    with pytest.raises(GeometryError):
        SlitPolyline(np.array([0.5j, 1j]))
    with pytest.raises(GeometryError):
        SlitPolyline(np.array([0, 1j, 1 + 0.5j, 0.5 + 1.5j, 0.5 + 0.2j]))
    with pytest.raises(GeometryError):
        SlitPolyline(np.array([0, 1j, 1 - 0.5j]))


def test_capacity_record():
    rec = CapacityRecord(np.array([0.5, 0.25, 0.25]))
    assert rec.total_c == 1.0
    np.testing.assert_array_equal(rec.times, [0.0, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        CapacityRecord(np.array([0.5, -0.1]))


def test_encode_vertical_segments():
    kappa, cap = encode_slit(VERTICAL)
    assert cap.total_c == pytest.approx(2.0, rel=1e-12)
    np.testing.assert_allclose(kappa.values, 0.0, atol=1e-14)
    assert cap.total_c == np.sum(cap.increments)
    kappa, cap = encode_slit(SlitPolyline.vertical(1.0, 2.0))
    assert cap.total_c == pytest.approx(2.0, rel=1e-12)
    np.testing.assert_allclose(kappa.values, 1.0, atol=1e-14)


def test_decode_constant_driving():
    trace = decode_driving(chordal_constant(0.0, 2.0))
    assert hausdorff(trace, VERTICAL, spacing=1e-4) <= 1e-4
    trace = decode_driving(chordal_constant(0.7, 2.0))
    assert hausdorff(trace, SlitPolyline.vertical(0.7, 2.0), spacing=1e-4) <= 1e-4


def test_tilted_segment_roundtrip():
    slit = SlitPolyline(np.array([0.0, 1.0 + 1.5j]))
    kappa, cap = encode_slit(slit)
    trace = decode_driving(kappa, cap)
    assert hausdorff(trace, slit, spacing=0.01) <= 1e-2


def test_random_slit_roundtrip_and_capacity():
    rng = np.random.default_rng(3)
    for _ in range(3):
        slit = random_slit(rng)
        kappa, cap = encode_slit(slit)
        trace = decode_driving(kappa, cap)
        assert trace.self_intersection is None
        assert hausdorff(trace, slit, spacing=0.01) <= 1e-2
        fmap = slit_map_from_driving(kappa, cap)
        coeff = capacity_coefficient(fmap, np.array([50.0, 100.0, 200.0]))
        np.testing.assert_allclose(coeff, cap.total_c, rtol=1e-2)


def test_hydrodynamic_expansion_vertical():
    kappa, cap = encode_slit(VERTICAL)
    fmap = slit_map_from_driving(kappa, cap)
    z = np.array([3 + 1j, -2 + 0.5j, 4j])
    np.testing.assert_allclose(fmap(z), np.where(np.sqrt(z * z - 4).imag >= 0,
                                                 np.sqrt(z * z - 4), -np.sqrt(z * z - 4)),
                               atol=1e-10)
    for y in (50.0, 100.0, 200.0):
        assert abs(y * (fmap(1j * y) - 1j * y) - 2.0j) <= 10.0 / y


def test_slit_to_measure_vertical_is_arcsine():
    mu = slit_to_measure(VERTICAL)
    x = np.linspace(-1.9, 1.9, 30)
    np.testing.assert_allclose(mu.density(x), 1 / (np.pi * np.sqrt(4 - x * x)), atol=1e-3)
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-8)
    assert M.moment(mu, 2) == pytest.approx(2.0, rel=2e-2)
    assert M.moment(mu, 1) == pytest.approx(0.0, abs=1e-6)


def test_translated_slit_gives_shifted_f_transform():
    # moving the slit to start at xi gives F(z) = xi + sqrt((z - xi)^2 - 4), which
    # has an atom at F^{-1}(0); translating the measure instead keeps the slit
    xi = 1.5
    mu = slit_to_measure(VERTICAL.translate(xi))
    assert mu.atoms.shape == (1, 2)
    z = np.array([0.3 + 1j, -2 + 0.4j, 3 + 2j])
    w = (z - xi) ** 2 - 4
    root = np.sqrt(w + 0j)
    root = np.where(root.imag < 0, -root, root)
    np.testing.assert_allclose(f_transform(mu, z), xi + root, atol=1e-6)


def test_capacity_equals_variance_random():
    rng = np.random.default_rng(8)
    slit = random_slit(rng, n_vertices=8)
    mu, info = slit_to_measure(slit, return_info=True)
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-6)
    assert abs(M.moment(mu, 2) - info.capacity.total_c) <= 0.02 * info.capacity.total_c


def test_cayley_pair():
    assert cayley(0.0) == pytest.approx(1j)
    marks = np.array([-1.0, 1j, -1j])
    np.testing.assert_allclose(cayley(marks), [0.0, -1.0, 1.0], atol=1e-15)
    rng = np.random.default_rng(2)
    z = 0.999 * np.sqrt(rng.uniform(0, 1, 1000)) * np.exp(2j * np.pi * rng.uniform(0, 1, 1000))
    back = cayley(cayley(z), CayleyDirection.HALF_PLANE_TO_DISC)
    assert np.max(np.abs(back - z)) <= 1e-12
    assert abs(cayley(cayley(0.0), "HalfPlaneToDisc")) <= 1e-15
    with pytest.raises(DomainError):
        cayley(1.0)
    with pytest.raises(DomainError):
        cayley(-1j, CayleyDirection.HALF_PLANE_TO_DISC)
