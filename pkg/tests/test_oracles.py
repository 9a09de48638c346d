"""Re-derive the frozen constants used elsewhere in the suite."""

import numpy as np
import sympy as sp

from test_monotone import GOLDEN_ATOMS  # noqa: E402

z = sp.symbols("z")


def test_golden_atoms_from_composed_f_transform():
    # atoms of mu |> mu sit at the real zeros of F(F(z)), weight 1 / (F o F)'
    f = z - 1 / z
    comp = f.subs(z, f)
    deriv = sp.diff(comp, z)
    atoms = sorted((float(r), float(1 / deriv.subs(z, r)))
                   for r in sp.solve(sp.numer(sp.together(comp)), z))
    np.testing.assert_allclose(atoms, GOLDEN_ATOMS, rtol=1e-15)


def test_semicircle_cauchy_at_2i():
    g = (z - sp.sqrt(z ** 2 - 4)) / 2
    val = complex(sp.N(g.subs(z, 2 * sp.I), 20))
    assert abs(val - (-0.41421356237309505j)) <= 1e-16


def test_chain_values_solve_their_loewner_equations():
    t = sp.symbols("t", real=True)
    koebe = sp.exp(t) * z / (1 - z) ** 2
    two = sp.exp(t) * z / (1 - z ** 2)
    for chain, field in ((koebe, (1 - z) / (1 + z)), (two, (1 - z ** 2) / (1 + z ** 2))):
        # radial chain equation: d/dt f = z f' p
        assert sp.simplify(sp.diff(chain, t) - z * sp.diff(chain, z) * field) == 0
    assert float(koebe.subs({t: 0, z: sp.Rational(3, 10)})) == 0.6122448979591837
    assert float(two.subs({t: 0, z: sp.Rational(3, 10)})) == 0.32967032967032967
