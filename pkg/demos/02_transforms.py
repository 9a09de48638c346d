# %% [markdown]
# # Cauchy, F- and Hilbert transforms
#
# The semicircle and arcsine laws have closed forms for all three
# transforms; Stieltjes inversion recovers a measure from its transform.

# %%
import numpy as np

from slitmaps import measures as M
from slitmaps.cauchy import cauchy_transform, f_transform, stieltjes_invert
from slitmaps.hilbert import hilbert_transform, verify_plemelj

semi, arc = M.semicircle(), M.arcsine()
print("G_semicircle(2i) =", cauchy_transform(semi, 2j))
print("F_arcsine(1+i) =", f_transform(arc, 1 + 1j), "vs", np.sqrt((1 + 1j) ** 2 - 4))

# %%
x = np.linspace(-1.5, 1.5, 7)
print("H_semicircle - x/(2 pi):", np.max(np.abs(hilbert_transform(semi, x) - x / (2 * np.pi))))
print("H_arcsine:", np.max(np.abs(hilbert_transform(arc, x))))

# %% [markdown]
# The principal value and the radial limit of the real part agree for
# continuous densities.

# %%
rep = verify_plemelj(M.bump(0.2, 1.3), 0.4)
print(rep.status, "PV", rep.pv_limit, "radial", rep.radial_limit)

# %%
mix = M.atomic([-1.0, 1.0], [0.5, 0.5])
inv = stieltjes_invert(mix, np.linspace(-2, 2, 81))
print("recovered atoms:", inv.atom_array())
