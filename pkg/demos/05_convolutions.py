# %% [markdown]
# # Monotone and classical convolution
#
# Monotone convolution composes F-transforms; classical convolution
# multiplies Fourier transforms, and Levy triples describe infinitely
# divisible laws.

# %%
import numpy as np

from slitmaps import measures as M
from slitmaps.cauchy import TransformGrid
from slitmaps.monotone import monotone_convolve, univalence_probe

two = M.atomic([-1.0, 1.0], [0.5, 0.5])
res = monotone_convolve(two, two)
print(res.measure.atoms)
print("composition residual:", res.residual)

# %% [markdown]
# z - 1/z is not injective: i/2 - sqrt(3)/2 and i/2 + sqrt(3)/2 both map to i.

# %%
xs = np.sqrt(3) / 2 * np.linspace(-2, 2, 9)
pts = (xs[None, :] + 1j * np.linspace(0.25, 2, 8)[:, None]).ravel()
probe = univalence_probe(TransformGrid.sample(lambda z: z - 1 / z, pts), tol=1e-10)
print([w for w in probe.witnesses if abs(w["F1"] - 1j) < 1e-9])

# %%
x = np.linspace(-3, 3, 5)
mu, nu = M.atomic([0.0, 1.0], [0.3, 0.7]), M.atomic([-2.0], [1.0])
conv = M.convolve_classical(mu, nu)
print("Fourier defect:", np.max(np.abs(M.fourier_transform(conv, x)
                                       - M.fourier_transform(mu, x) * M.fourier_transform(nu, x))))
poisson = M.LevyTriple(0.0, 0.0, M.atomic([2.0], [1.5]))
print(M.levy_khintchine(poisson, x))
print(M.unique_embedding(poisson))
