"""One test per acceptance criterion; conftest prints a PASS/FAIL line for each."""

import json

import numpy as np
import pytest

from slitmaps import measures as M
from slitmaps.cauchy import TransformGrid
from slitmaps.characterize import (SlitCase, check_slit_conditions, locate_atom,
                                   reconstruct_slit)
from slitmaps.cli import main
from slitmaps.hilbert import hilbert_on_grid, hilbert_transform, verify_plemelj
from slitmaps.loewner import (DrivingFunction, HerglotzFieldSpec, Interpolation,
                              chain_derivative_jump, chain_initial, solve_transition)
from slitmaps.monotone import univalence_probe
from slitmaps.zipper import (SlitPolyline, capacity_coefficient, decode_driving, encode_slit,
                             hausdorff, random_slit, slit_map_from_driving, slit_to_measure)

KOEBE = HerglotzFieldSpec.single(DrivingFunction.constant(1.0 + 0j))
TWO_SLIT = HerglotzFieldSpec.convex([(DrivingFunction.constant(1j), 0.5),
                                     (DrivingFunction.constant(-1j), 0.5)])


def disc_grid(n=50, radius=0.5):
    # golden-angle spiral filling the closed disc of the given radius
    k = np.arange(n)
    return radius * np.sqrt((k + 0.5) / n) * np.exp(2j * np.pi * k * (3 - np.sqrt(5)) / 2)


def test_criterion_01_koebe_chain():
    z = disc_grid()
    res = chain_initial(KOEBE, 0.0, z)
    assert res.horizon > 0 and len(res.history) >= 2
    assert np.max(np.abs(res.values - z / (1 - z) ** 2)) <= 1e-4


def test_criterion_02_two_slit_chain():
    z = disc_grid()
    res = chain_initial(TWO_SLIT, 0.0, z)
    assert np.max(np.abs(res.values - z / (1 - z * z))) <= 1e-4
    smooth = chain_derivative_jump(TWO_SLIT, np.array([0.3]), 1.0)[2][0]
    step = DrivingFunction.from_angles([0.0, 1.0], [np.pi / 2, -np.pi / 2],
                                       Interpolation.CONSTANT)
    seq = chain_derivative_jump(HerglotzFieldSpec.single(step), np.array([0.3]), 1.0)[2][0]
    assert seq > 10 * smooth


@pytest.mark.parametrize("field", [KOEBE, TWO_SLIT, HerglotzFieldSpec.uniform()],
                         ids=["koebe", "two", "uniform"])
def test_criterion_03_transition_cocycle(field):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        s, t, u = np.sort(rng.uniform(0.0, 2.0, 3))
        z = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        direct = solve_transition(field, s, u, np.array([z])).values
        inner = solve_transition(field, s, t, np.array([z])).values
        worst = max(worst, abs(direct - solve_transition(field, t, u, inner).values)[0])
    assert worst <= 1e-7


def test_criterion_04_arcsine_vertical_slit():
    mu = slit_to_measure(SlitPolyline.vertical(0.0, 2.0))
    x = np.linspace(-1.9, 1.9, 30)
    assert np.max(np.abs(mu.density(x) - 1 / (np.pi * np.sqrt(4 - x * x)))) <= 1e-3
    assert M.moment(mu, 2) == pytest.approx(2.0, rel=2e-2)


def test_criterion_05_arcsine_reconstruction():
    mu = M.arcsine()
    cur = reconstruct_slit(mu)
    inner = (cur.x > -2) & (cur.x < 2)
    assert np.max(np.abs(cur.gamma[inner] - 1j * np.sqrt(4 - cur.x[inner] ** 2))) <= 1e-3
    assert abs(cur.u) <= 1e-3
    w = check_slit_conditions(mu).welding
    assert np.max(np.abs(w.samples[:, 1] + w.samples[:, 0])) <= 1e-3


def test_criterion_06_semicircle_rejection(tmp_path):
    src = tmp_path / "semicircle.json"
    src.write_text(json.dumps({"segments": [{"a": -2.0, "b": 2.0, "formula": "semicircle"}]}))
    outputs = []
    for name in ("one", "two"):
        assert main(["--out", str(tmp_path / name), "check-slit", str(src)]) == 4
        outputs.append((tmp_path / name / "check_slit.json").read_bytes())
    assert outputs[0] == outputs[1]
    report = json.loads(outputs[0])
    assert report["case"] == SlitCase.REJECTED.value
    match = report["conditions"]["c"]["witness"]["density_matching"]
    assert match["antisymmetric"] and match["H(x)"] == pytest.approx(1 / (2 * np.pi), abs=1e-6)


def test_criterion_07_plemelj_equality():
    rng = np.random.default_rng(7)
    for _ in range(20):
        center, half = rng.uniform(-1, 1), rng.uniform(0.5, 2.0)
        mu = M.bump(center, half, int(rng.integers(2, 6)))
        rep = verify_plemelj(mu, center + half * rng.uniform(-0.8, 0.8))
        assert rep.passed and rep.difference <= 1e-5


def test_criterion_08_non_injectivity_witness():
    xs = np.sqrt(3) / 2 * np.linspace(-2.0, 2.0, 9)
    ys = np.linspace(0.25, 2.0, 8)
    pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    probe = univalence_probe(TransformGrid.sample(lambda z: z - 1 / z, pts), tol=1e-10)
    hits = [w for w in probe.witnesses
            if abs(w["F1"] - 1j) <= 1e-10 and abs(w["F2"] - 1j) <= 1e-10]
    assert hits and hits[0]["distance"] <= 1e-10
    pair = np.sort_complex([hits[0]["z1"], hits[0]["z2"]])
    np.testing.assert_allclose(pair, [-np.sqrt(3) / 2 + 0.5j, np.sqrt(3) / 2 + 0.5j], atol=1e-12)


def test_criterion_09_hilbert_closed_forms():
    x = np.linspace(-1.9, 1.9, 20)
    assert np.max(np.abs(hilbert_transform(M.semicircle(), x) - x / (2 * np.pi))) <= 1e-4
    assert np.max(np.abs(hilbert_transform(M.arcsine(), x))) <= 1e-4


def test_criterion_10_zipper_roundtrip():
    rng = np.random.default_rng(10)
    for _ in range(10):
        slit = random_slit(rng, n_vertices=20)
        kappa, cap = encode_slit(slit)
        assert hausdorff(decode_driving(kappa, cap), slit, spacing=0.01) <= 1e-2
        coeff = capacity_coefficient(slit_map_from_driving(kappa, cap), np.array([200.0]))
        assert abs(coeff[0] - cap.total_c) <= 1e-2 * cap.total_c


def test_criterion_11_atom_machinery():
    slit = random_slit(np.random.default_rng(11), base=0.7)
    mu, info = slit_to_measure(slit, return_info=True)
    v = check_slit_conditions(mu)
    assert v.case is SlitCase.NONZERO_C
    loc = locate_atom(mu, c_sign=np.sign(v.C))
    assert abs(loc.position - info.inversion.atoms[0].position) <= 1e-3
    seg = mu.segments[0]
    ends = hilbert_on_grid(mu, np.array([seg.a, seg.b]))
    np.testing.assert_allclose(ends, 1 / (np.pi * slit.base.real), atol=1e-3)


def test_criterion_12_classical_side():
    rng = np.random.default_rng(12)
    x = np.linspace(-5, 5, 100)
    for _ in range(5):
        mu, nu = (M.atomic(rng.uniform(-3, 3, n), rng.dirichlet(np.ones(n)))
                  for n in rng.integers(1, 6, 2))
        conv = M.convolve_classical(mu, nu)
        product = M.fourier_transform(mu, x) * M.fourier_transform(nu, x)
        diff = M.fourier_transform(conv, x) - product
        assert np.max(np.abs(diff)) <= 1e-12

    lam, x0 = 1.7, 2.5
    poisson = M.LevyTriple(0.0, 0.0, M.atomic([x0], [lam]))
    got = M.levy_khintchine(poisson, x)
    assert np.max(np.abs(got - np.exp(lam * (np.exp(1j * x * x0) - 1)))) <= 1e-12

    bar = M.MeasureSpec(segments=[M.DensitySegment(1.0, 2.0, func=lambda t: np.full_like(t, 0.5))])
    table = [
        ((0.0, 0.0, None), True),
        ((0.0, 1.0, None), True),
        ((0.0, 2.5, None), True),
        ((0.0, 0.0, M.atomic([2.0], [1.0])), True),
        ((0.0, 0.0, M.atomic([-0.5], [3.0])), True),
        ((0.0, 0.0, M.atomic([1.0], [0.2])), True),
        ((0.0, 1.0, M.atomic([1.0], [1.0])), False),
        ((0.0, 0.0, M.atomic([-1.0, 1.0], [0.5, 0.5])), False),
        ((0.0, 0.0, bar), False),
        ((0.0, 1.0, bar), False),
        ((0.0, 0.0, M.MeasureSpec(np.array([[3.0, 0.4]]), bar.segments)), False),
        ((3.0, 0.0, M.atomic([2.0], [1.0])), True),
    ]
    for (a, sigma, nu), expected in table:
        triple = M.LevyTriple(a, sigma, nu if nu is not None else M.MeasureSpec())
        flag, diagnostic = M.unique_embedding(M.normalize_levy(triple)[0])
        assert flag is expected, diagnostic
