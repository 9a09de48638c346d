# %% [markdown]
# # Which measures come from slits?
#
# A slit measure admits a decreasing welding map of its support that keeps
# both the density and the Hilbert transform. The arcsine law passes with
# the reflection; the semicircle law fails.

# %%
import numpy as np

from slitmaps import measures as M
from slitmaps.characterize import check_slit_conditions, reconstruct_slit

v = check_slit_conditions(M.arcsine())
print(v.case, "welding residual", v.welding.max_residual, "fixed point", v.welding.u)
cur = reconstruct_slit(M.arcsine())
print("tip:", cur.tip)

# %%
v = check_slit_conditions(M.semicircle())
print(v.case)
match = v.conditions["c"].witness["density_matching"]
print("x =", match["x"], "h_d(x) =", match["h_d(x)"])
print("H(x) =", match["H(x)"], "H(h_d(x)) =", match["H(h_d(x))"])

# %% [markdown]
# The curve reconstructed from an encoded slit measure retraces the slit.

# %%
from slitmaps.zipper import hausdorff, random_slit, slit_to_measure

slit = random_slit(np.random.default_rng(1))
mu = slit_to_measure(slit)
cur = reconstruct_slit(mu)
print("Hausdorff to the slit:", hausdorff(cur.gamma, slit, spacing=1e-3))
