# %% [markdown]
# # Slits, driving functions and slit measures
#
# A polygonal slit is encoded into a chordal driving function and capacity
# record, decoded back, and turned into the probability measure whose
# F-transform is the slit map.

# %%
import numpy as np

from slitmaps import measures as M
from slitmaps.zipper import (SlitPolyline, capacity_coefficient, decode_driving, encode_slit,
                             hausdorff, random_slit, slit_map_from_driving, slit_to_measure)

slit = random_slit(np.random.default_rng(4))
kappa, cap = encode_slit(slit)
trace = decode_driving(kappa, cap)
print("total capacity:", cap.total_c)
print("roundtrip Hausdorff:", hausdorff(trace, slit, spacing=0.01))
fmap = slit_map_from_driving(kappa, cap)
print("capacity from expansion:", capacity_coefficient(fmap, np.array([100.0, 200.0])))

# %% [markdown]
# The vertical segment from 0 to 2i belongs to the arcsine law, whose
# variance equals the capacity 2.

# %%
mu = slit_to_measure(SlitPolyline.vertical(0.0, 2.0))
print("variance:", M.moment(mu, 2))

# %% [markdown]
# A slit starting away from 0 gives a measure with an atom.

# %%
mu, info = slit_to_measure(random_slit(np.random.default_rng(5), base=0.7), return_info=True)
print("atoms:", mu.atoms)
