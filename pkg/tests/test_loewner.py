import numpy as np
import pytest

from slitmaps.errors import DomainError
from slitmaps.loewner import (DrivingFunction, DrivingMode, HerglotzFieldSpec, Interpolation,
                              chain_derivative_jump, chain_initial, evaluate_field,
                              solve_transition)

KOEBE = HerglotzFieldSpec.single(DrivingFunction.constant(1.0 + 0j))
TWO_SLIT = HerglotzFieldSpec.convex([(DrivingFunction.constant(1j), 0.5),
                                     (DrivingFunction.constant(-1j), 0.5)])
UNIFORM = HerglotzFieldSpec.uniform()
RNG = np.random.default_rng(11)


def disc_points(n, radius=0.5, rng=RNG):
    return radius * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def test_driving_function_validation():
    with pytest.raises(ValueError):
        DrivingFunction(np.array([0.0, 0.0]), np.array([1.0, 1.0]) + 0j)
    with pytest.raises(ValueError):
        DrivingFunction(np.array([0.0]), np.array([2.0 + 0j]))
    k = DrivingFunction.from_angles([0.0, 1.0], [0.0, np.pi / 2])
    assert k(0.5) == pytest.approx(np.exp(1j * np.pi / 4))
    step = DrivingFunction.from_angles([0.0, 1.0], [0.0, np.pi / 2], Interpolation.CONSTANT)
    assert step(0.5) == pytest.approx(1.0)
    assert step.mode is DrivingMode.RADIAL


def test_evaluate_field_examples():
    z = disc_points(20, 0.95)
    np.testing.assert_allclose(evaluate_field(KOEBE, 0.3, z), (1 - z) / (1 + z), rtol=1e-14)
    np.testing.assert_allclose(evaluate_field(UNIFORM, 0.3, z), 1.0, atol=1e-12)
    np.testing.assert_allclose(evaluate_field(TWO_SLIT, 0.3, z), (1 - z * z) / (1 + z * z),
                               rtol=1e-13)
    for f in (KOEBE, UNIFORM, TWO_SLIT):
        assert evaluate_field(f, 1.0, 0.0) == pytest.approx(1.0, abs=1e-12)
        assert np.all(evaluate_field(f, 1.0, z).real > 0)


def test_transition_examples():
    z = disc_points(10)
    res = solve_transition(UNIFORM, 0.0, 1.3, z)
    np.testing.assert_allclose(res.values, np.exp(-1.3) * z, atol=1e-10)
    w = solve_transition(KOEBE, 0.0, 1.0, np.array([0.3])).values[0]
    assert np.exp(1.0) * w / (1 - w) ** 2 == pytest.approx(0.3 / 0.49, abs=1e-8)
    z0 = 0.3
    w = solve_transition(TWO_SLIT, 0.0, 1.0, np.array([z0])).values[0]
    assert np.exp(1.0) * w / (1 - w * w) == pytest.approx(z0 / (1 - z0 * z0), abs=1e-8)


def test_transition_stays_in_disc_and_contracts():
    z = disc_points(10, 0.9)
    prev = np.abs(z)
    for t in (0.5, 1.0, 2.0):
        w = solve_transition(KOEBE, 0.0, t, z).values
        assert np.all(np.abs(w) < 1) and np.all(np.abs(w) <= prev + 1e-12)
        prev = np.abs(w)


def test_transition_rejects_outside_points():
    with pytest.raises(DomainError):
        solve_transition(KOEBE, 0.0, 1.0, np.array([1.2]))


def test_chain_examples():
    z = np.array([0.3])
    assert chain_initial(UNIFORM, 0.0, z).values[0] == pytest.approx(0.3, abs=1e-10)
    assert chain_initial(KOEBE, 0.0, z).values[0] == pytest.approx(0.6122448979591837, abs=1e-6)
    assert chain_initial(TWO_SLIT, 0.0, z).values[0] == pytest.approx(0.32967032967032967,
                                                                       abs=1e-6)


def test_chain_at_later_time_scales():
    z = disc_points(5)
    res = chain_initial(KOEBE, 0.7, z)
    np.testing.assert_allclose(res.values, np.exp(0.7) * z / (1 - z) ** 2, atol=1e-5)
    assert res.horizon >= 8 and len(res.history) >= 2


@pytest.mark.parametrize("field", [KOEBE, TWO_SLIT, UNIFORM], ids=["koebe", "two", "uniform"])
def test_cocycle_and_normalisation(field):
    rng = np.random.default_rng(5)
    for _ in range(5):
        s, t, u = np.sort(rng.uniform(0, 2, 3))
        z = disc_points(4, 0.8, rng)
        direct = solve_transition(field, s, u, z).values
        composed = solve_transition(field, t, u, solve_transition(field, s, t, z).values).values
        assert np.max(np.abs(direct - composed)) <= 1e-7
        h = 1e-4
        deriv = (solve_transition(field, s, t, np.array([h, -h])).values @ [1, -1]) / (2 * h)
        assert abs(deriv) == pytest.approx(np.exp(-(t - s)), abs=1e-6)


def test_chain_monotonicity_proxy():
    z = 0.5 * np.exp(2j * np.pi * np.arange(16) / 16)
    s, t = 0.2, 0.9
    fs = chain_initial(KOEBE, s, z).values
    phi = solve_transition(KOEBE, s, t, z).values
    assert np.all(np.abs(phi) < 0.5)
    ft = chain_initial(KOEBE, t, phi).values
    np.testing.assert_allclose(fs, ft, atol=1e-5)


@pytest.mark.parametrize("field", [KOEBE, TWO_SLIT], ids=["koebe", "two"])
def test_koebe_quarter_bound(field):
    z = 0.99 * np.exp(2j * np.pi * np.arange(64) / 64)
    # points next to the slit base have images of size ~1e4 and need long horizons
    vals = chain_initial(field, 0.0, z, max_horizon=128.0).values
    assert np.min(np.abs(vals)) >= 0.25 * (1 - 1e-3)


def test_sequential_schedule_has_derivative_jump():
    t1 = 1.0
    smooth = chain_derivative_jump(TWO_SLIT, np.array([0.3]), t1)[2][0]
    step = DrivingFunction.from_angles([0.0, t1], [np.pi / 2, -np.pi / 2], Interpolation.CONSTANT)
    seq = chain_derivative_jump(HerglotzFieldSpec.single(step), np.array([0.3]), t1)[2][0]
    assert seq > 10 * smooth
