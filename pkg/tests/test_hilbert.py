import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitmaps import measures as M
from slitmaps.errors import ExcludedMassWarning, ProximityError
from slitmaps.hilbert import (HilbertEvaluation, hilbert_on_grid, hilbert_pv, hilbert_radial,
                              hilbert_transform, verify_plemelj)

INTERIOR = np.linspace(-1.9, 1.9, 20)


def test_point_mass_pv_and_radial():
    mu = M.point_mass(0.5)
    assert hilbert_pv(mu, 2.0, 0.1) == pytest.approx(1 / (np.pi * 1.5), rel=1e-14)
    eps = 1e-7
    assert hilbert_radial(mu, 2.0, eps) == pytest.approx(1 / (np.pi * 1.5), rel=1e-12)


def test_atom_inside_window_is_excluded_with_warning():
    mu = M.atomic([0.0, 1.0], [0.5, 0.5])
    with pytest.warns(ExcludedMassWarning):
        val = hilbert_pv(mu, 0.05, 0.1)
    assert val == pytest.approx(0.5 / (np.pi * (0.05 - 1.0)))


def test_semicircle_closed_form():
    np.testing.assert_allclose(hilbert_transform(M.semicircle(), INTERIOR), INTERIOR / (2 * np.pi),
                               atol=1e-8)
    np.testing.assert_allclose(hilbert_on_grid(M.semicircle(), INTERIOR), INTERIOR / (2 * np.pi),
                               atol=1e-8)
    assert hilbert_radial(M.semicircle(), 1.0, 1e-9) == pytest.approx(1 / (2 * np.pi), abs=1e-7)


def test_arcsine_closed_form():
    np.testing.assert_allclose(hilbert_transform(M.arcsine(), INTERIOR), 0.0, atol=1e-8)
    np.testing.assert_allclose(hilbert_on_grid(M.arcsine(), INTERIOR), 0.0, atol=1e-8)
    np.testing.assert_allclose(hilbert_radial(M.arcsine(), INTERIOR, 1e-9), 0.0, atol=1e-7)


def test_hilbert_at_atom_raises():
    with pytest.raises(ProximityError):
        hilbert_transform(M.point_mass(0.0), 0.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 1.9), st.floats(0.01, 0.5))
def test_antisymmetry_for_symmetric_measure(x, eps):
    mu = M.semicircle()
    assert hilbert_pv(mu, -x, eps) == pytest.approx(-hilbert_pv(mu, x, eps), abs=1e-10)


def test_linearity():
    nu1, nu2 = M.semicircle(), M.bump(0.0, 1.0)
    d1, d2 = nu1.segments[0], nu2.segments[0]

    def mixed(t):
        inner = (t > -1) & (t < 1)
        return 0.3 * d1(t) + 0.7 * np.where(inner, d2(np.clip(t, -1, 1)), 0.0)

    mix = M.MeasureSpec(segments=[M.DensitySegment(-2.0, 2.0, func=mixed, breaks=(-1.0, 1.0))])
    x = np.array([-0.7, 0.1, 0.9, 1.5])
    np.testing.assert_allclose(hilbert_transform(mix, x),
                               0.3 * hilbert_transform(nu1, x) + 0.7 * hilbert_transform(nu2, x),
                               atol=1e-9)


def test_plemelj_examples():
    rep = verify_plemelj(M.bump(0.2, 1.3), 0.4)
    assert rep.passed and rep.difference <= 1e-6
    rep = verify_plemelj(M.arcsine(), 0.0)
    assert rep.passed and abs(rep.pv_limit) < 1e-6 and abs(rep.radial_limit) < 1e-6
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExcludedMassWarning)
        rep = verify_plemelj(M.atomic([0.0, 1.0], [0.5, 0.5]), 0.0)
    assert rep.status == "HYPOTHESIS_VIOLATION"
    assert all(isinstance(e, HilbertEvaluation) for e in rep.evaluations())


def test_evaluation_record_validation():
    with pytest.raises(ValueError):
        HilbertEvaluation(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        HilbertEvaluation(0.0, 0.1, 0.0, 0.0, (0.0, -1.0))
