# %% [markdown]
# # Radial Loewner chains
#
# A constant driving point grows a single radial slit and the chain is the
# Koebe function. Two antipodal driving points with equal weights grow two
# slits at once.

# %%
import numpy as np

from slitmaps.loewner import (DrivingFunction, HerglotzFieldSpec, Interpolation,
                              chain_derivative_jump, chain_initial, solve_transition)

koebe = HerglotzFieldSpec.single(DrivingFunction.constant(1.0 + 0j))
two = HerglotzFieldSpec.convex([(DrivingFunction.constant(1j), 0.5),
                                (DrivingFunction.constant(-1j), 0.5)])
z = 0.5 * np.exp(2j * np.pi * np.arange(8) / 8)

# %%
res = chain_initial(koebe, 0.0, z)
print("Koebe chain error:", np.max(np.abs(res.values - z / (1 - z) ** 2)))
print("final horizon:", res.horizon)

res = chain_initial(two, 0.0, z)
print("two-slit chain error:", np.max(np.abs(res.values - z / (1 - z * z))))

# %% [markdown]
# Transition maps compose: running from s to t and then from t to u is the
# same as running from s to u.

# %%
s, t, u = 0.2, 0.7, 1.5
direct = solve_transition(koebe, s, u, z).values
composed = solve_transition(koebe, t, u, solve_transition(koebe, s, t, z).values).values
print("cocycle defect:", np.max(np.abs(direct - composed)))

# %% [markdown]
# Growing the two slits one after the other instead of together makes the
# chain's time derivative jump at the switch.

# %%
step = DrivingFunction.from_angles([0.0, 1.0], [np.pi / 2, -np.pi / 2], Interpolation.CONSTANT)
smooth = chain_derivative_jump(two, np.array([0.3]), 1.0)[2][0]
seq = chain_derivative_jump(HerglotzFieldSpec.single(step), np.array([0.3]), 1.0)[2][0]
print(f"derivative jump: simultaneous {smooth:.2e}, sequential {seq:.2e}")
