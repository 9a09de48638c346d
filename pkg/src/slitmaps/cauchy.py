"""Cauchy (Stieltjes) and F-transforms, Stieltjes-Perron inversion, Herglotz functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from ._numerics import composite_rule, gauss_legendre, richardson, validate_schedule
from .errors import PoleProximityError, ProximityError
from .measures import DensitySegment, MeasureSpec, _merge_atoms

PROXIMITY_TOL = 1e-12
ATOM_THRESHOLD = 1e-6
DEFAULT_EPS = (1e-2, 5e-3, 2.5e-3)


class TransformKind(str, Enum):
    CAUCHY_G = "CauchyG"
    F_TRANSFORM = "FTransform"
    CARATHEODORY = "Caratheodory"


@dataclass
class TransformGrid:
    """Sampled transform values together with their evaluation points."""

    points: np.ndarray
    values: np.ndarray
    kind: TransformKind = TransformKind.F_TRANSFORM

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).ravel()
        self.values = np.asarray(self.values, dtype=complex).ravel()
        self.kind = TransformKind(self.kind)
        if self.points.shape != self.values.shape:
            raise ValueError("points and values must have equal length")
        if self.kind is TransformKind.CARATHEODORY:
            if np.any(np.abs(self.points) >= 1):
                raise ValueError("Caratheodory samples must lie in the open unit disc")
        elif np.any(self.points.imag <= 0):
            raise ValueError("half-plane samples must satisfy Im z > 0")

    @classmethod
    def sample(cls, func, points, kind=TransformKind.F_TRANSFORM):
        points = np.asarray(points, dtype=complex).ravel()
        return cls(points, np.asarray(func(points), dtype=complex), kind)

    def lookup(self, z, tol=1e-12):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        for i, zz in enumerate(z):
            k = int(np.argmin(np.abs(self.points - zz)))
            if abs(self.points[k] - zz) > tol * max(1.0, abs(zz)):
                raise KeyError(f"no sample at {zz}")
            out[i] = self.values[k]
        return out


@dataclass
class PickNevanlinnaData:
    """``F(z) = z + b + int (1 + t z) / (t - z) rho(dt)``."""

    b: float
    rho: MeasureSpec = field(default_factory=MeasureSpec)

    def __post_init__(self):
        if np.any(self.rho.weights < 0):
            raise ValueError("rho must be nonnegative")


def pick_nevanlinna(data: PickNevanlinnaData, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = z + data.b
    if data.rho.atoms.size or data.rho.segments:
        out = out + np.array([data.rho.integrate(lambda t, zz=zz: (1 + t * zz) / (t - zz))
                              for zz in z])
    return out


# --------------------------------------------------------------------------
# Cauchy transform

def _segment_cauchy(seg: DensitySegment, z, tol):
    """``int d(t) / (z - t) dt`` over one segment, vectorised over `z`."""
    m = 0.5 * (seg.a + seg.b)
    r = 0.5 * (seg.b - seg.a)
    out = np.empty(z.shape, dtype=complex)
    near = (np.abs(z.imag) < 0.25 * r) & (z.real > seg.a - 0.25 * r) & (z.real < seg.b + 0.25 * r)
    far = ~near
    if np.any(far):
        if seg.rule is not None:
            t, w, d = seg.rule_values()
            wd = w * d
        elif seg.breaks:
            special = [seg.a, *seg.breaks, seg.b]
            mesh = np.concatenate([special, np.linspace(seg.a, seg.b, 9)])
            t, w = composite_rule(mesh, 32, special)
            wd = w * seg(t)
        else:
            th, w = gauss_legendre(256, 0.0, np.pi)
            t = m - r * np.cos(th)
            wd = w * seg(t) * r * np.sin(th)
        out[far] = (wd[None, :] / (z[far][:, None] - t[None, :])).sum(axis=1)
    for k in np.flatnonzero(near):
        zz = z[k]
        t, wt = _graded_rule(seg, zz)
        if seg.a < zz.real < seg.b:
            # subtract d(Re z): what remains stays bounded as Im z -> 0, which
            # keeps node rounding from being amplified by 1 / Im z
            dx = float(seg(np.array([zz.real]))[0])
            out[k] = np.sum(wt * (seg(t) - dx) / (zz - t)) \
                + dx * (np.log(zz - seg.a) - np.log(zz - seg.b))
        else:
            out[k] = np.sum(wt * seg(t) / (zz - t))
    return out


def _graded_rule(seg: DensitySegment, z, order=24):
    """Composite rule on ``[a, b]`` graded geometrically towards ``Re z``.

    Pieces ``[x + 2^k y, x + 2^(k+1) y]`` keep every piece at least its own
    length away from the near-singularity at ``z = x + i y``; pieces that end
    at ``a``, ``b`` or a declared break use the cosine substitution.
    """
    x, y = z.real, max(abs(z.imag), 1e-300)
    length = seg.b - seg.a
    offsets = y * 2.0 ** np.arange(0, max(1, int(np.ceil(np.log2(length / y)))) + 1)
    special = np.concatenate([[seg.a, seg.b], np.asarray(seg.breaks, dtype=float)])
    graded = np.concatenate([x - offsets, x + offsets])
    graded = graded[(graded > seg.a) & (graded < seg.b)]
    # a graded point just short of an endpoint or break would leave a plain
    # piece ending near that singularity; let the cosine piece absorb it
    clear = np.min(np.abs(graded[:, None] - special[None, :]), axis=1) >= 0.5 * np.abs(graded - x)
    mesh = np.concatenate([special, graded[clear]])
    return composite_rule(mesh, order, special, merge=1e-15)


def cauchy_transform(mu: MeasureSpec, z, tol=None):
    """``G(z) = int mu(dt) / (z - t)``.

    Real `z` are allowed at positive distance from the support; otherwise a
    :class:`ProximityError` is raised.
    """
    tol = mu.tol if tol is None else tol
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(zs.shape, dtype=complex)
    if mu.atoms.size:
        diff = zs[:, None] - mu.positions[None, :]
        if np.any(np.abs(diff) < PROXIMITY_TOL):
            raise ProximityError("evaluation point coincides with an atom")
        out += (mu.weights[None, :] / diff).sum(axis=1)
    for seg in mu.segments:
        on_real = np.abs(zs.imag) < PROXIMITY_TOL
        if np.any(on_real & (zs.real > seg.a - PROXIMITY_TOL) & (zs.real < seg.b + PROXIMITY_TOL)):
            raise ProximityError(f"real evaluation point inside the support [{seg.a}, {seg.b}]")
        out += _segment_cauchy(seg, zs, tol)
    return out[0] if np.ndim(z) == 0 else out


def f_transform(mu: MeasureSpec, z, tol=None):
    """``F = 1 / G``; maps the upper half-plane into its closure."""
    g = np.atleast_1d(cauchy_transform(mu, z, tol))
    if np.any(np.abs(g) < PROXIMITY_TOL):
        raise PoleProximityError("Cauchy transform vanishes; F has a pole here")
    out = 1.0 / g
    return out[0] if np.ndim(z) == 0 else out


# --------------------------------------------------------------------------
# Stieltjes-Perron inversion

@dataclass
class Atom:
    position: float
    weight: float
    error: float


@dataclass
class InversionResult:
    """Density samples, per-point error estimates and detected atoms."""

    x: np.ndarray
    density: np.ndarray
    density_error: np.ndarray
    converged: np.ndarray
    atoms: list
    rejected_candidates: list
    eps: np.ndarray

    def atom_array(self):
        if not self.atoms:
            return np.zeros((0, 2))
        return np.array([[a.position, a.weight] for a in self.atoms])

    def to_measure(self, min_density=1e-9, label=None) -> MeasureSpec:
        """Turn the samples into atoms plus one segment per positive run."""
        segs = []
        pos = self.density > min_density
        idx = np.flatnonzero(pos)
        if idx.size:
            runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
            for run in runs:
                lo = max(run[0] - 1, 0)
                hi = min(run[-1] + 1, self.x.size - 1)
                if hi - lo < 2:
                    continue
                xs = self.x[lo:hi + 1]
                ds = np.clip(self.density[lo:hi + 1], 0, None)
                uniform = np.allclose(np.diff(xs), xs[1] - xs[0], rtol=1e-9, atol=1e-14)
                if uniform:
                    segs.append(DensitySegment(xs[0], xs[-1], samples=ds))
                else:
                    segs.append(DensitySegment(xs[0], xs[-1],
                                               func=lambda t, xs=xs, ds=ds: np.interp(t, xs, ds)))
        atoms = _merge_atoms(self.atom_array())
        return MeasureSpec(atoms, segs, label)


def _as_cauchy_callable(transform):
    if isinstance(transform, MeasureSpec):
        return (lambda z: cauchy_transform(transform, z)), True
    if isinstance(transform, TransformGrid):
        if transform.kind is TransformKind.F_TRANSFORM:
            return (lambda z: 1.0 / transform.lookup(z)), False
        return transform.lookup, False
    if callable(transform):
        return (lambda z: np.asarray(transform(np.asarray(z, dtype=complex)), dtype=complex)), True
    raise TypeError("transform must be a MeasureSpec, TransformGrid or callable G")


def _refine_pole(G, lo, hi, eps, stages=3):
    # maximise -Im G(x + i eps): a Lorentzian of width eps around the pole whose
    # peak is shifted only by the curvature of the background. |G| would be
    # dragged away by a real background of size ~ eps^2 |B| / weight.
    # locate the peak on a fine sub-grid first: a heavier pole just outside the
    # bracket can dominate |G| at the bracket edge
    sub = np.linspace(lo, hi, 81)
    k = int(np.argmax(-np.atleast_1d(G(sub + 1j * eps)).imag))
    step = sub[1] - sub[0]
    lo, hi = sub[k] - 2 * step, sub[k] + 2 * step
    x0 = sub[k]
    for _ in range(stages):
        c = 0.5 * (lo + hi)
        # optimise the offset from c: fminbound's tolerance is relative to |x|
        res = optimize.minimize_scalar(
            lambda s: complex(np.atleast_1d(G(np.array([c + s + 1j * eps])))[0]).imag,
            bounds=(lo - c, hi - c), method="bounded", options={"xatol": 1e-3 * eps})
        x0 = c + float(res.x)
        eps *= 1e-2
        lo, hi = x0 - 20 * eps, x0 + 20 * eps
    return x0


def stieltjes_invert(transform, x_grid, eps_schedule=DEFAULT_EPS, order=None,
                     atom_threshold=ATOM_THRESHOLD, flag_tol=1e-4, atom_settle=0.1,
                     max_passes=4):
    """Recover density and atoms from boundary values of a Cauchy transform.

    ``density(x) = -Im G(x + i eps) / pi`` and the atom mass
    ``-eps Im G(x + i eps)`` are extrapolated to ``eps -> 0`` over the
    schedule. A grid maximum of the atom mass is refined to the pole by
    maximising ``-Im G(x + i eps)`` at shrinking heights when `transform` can be evaluated off
    the sample points. It is accepted as an atom when the extrapolated mass
    exceeds `atom_threshold` *and* the raw masses have settled (relative
    change below `atom_settle` over the last halving); integrable blow-ups
    such as arcsine endpoints scale like ``sqrt(eps)`` and are reported in
    ``rejected_candidates`` instead.

    Parameters
    ----------
    transform : MeasureSpec, TransformGrid or callable
        Callables are taken to be ``G``; a grid of kind ``FTransform`` is
        inverted pointwise first.
    x_grid : array_like
        Real evaluation points.
    eps_schedule : sequence of float
        Strictly decreasing positive heights.
    """
    eps = validate_schedule(eps_schedule)
    x = np.asarray(x_grid, dtype=float)
    G, refinable = _as_cauchy_callable(transform)
    vals = np.array([np.atleast_1d(G(x + 1j * e)) for e in eps])

    atoms, rejected, visited = [], [], set()
    same_atom = 1e-3 * (np.min(np.diff(x)) if x.size > 1 else 1.0)

    def deflated(z):
        out = np.atleast_1d(G(z))
        for a in atoms:
            out = out - a.weight / (z - a.position)
        return out

    # rescan after subtracting accepted atoms, so poles closer together than
    # the grid step are found one by one
    for _ in range(max_passes):
        m_last = -eps[-1] * np.atleast_1d(deflated(x + 1j * eps[-1])).imag
        candidates = []
        for i in range(x.size):
            left = m_last[i - 1] if i > 0 else -np.inf
            right = m_last[i + 1] if i < x.size - 1 else -np.inf
            if m_last[i] > atom_threshold and m_last[i] >= left and m_last[i] >= right \
                    and i not in visited:
                candidates.append(i)
        if not candidates:
            break
        found = False
        for i in candidates:
            x0 = x[i]
            if refinable and x.size > 1:
                x0 = _refine_pole(deflated, x[max(i - 1, 0)], x[min(i + 1, x.size - 1)], eps[-1])
            if any(abs(x0 - a.position) < same_atom for a in atoms):
                continue
            # a refined pole is known to ~eps^3, so the mass can be read off much
            # closer to the axis, where neighbouring poles no longer bias it
            eps_m = eps * 1e-2 if refinable else eps
            g0 = np.array([complex(deflated(np.array([x0 + 1j * e]))[0]) for e in eps_m])
            m0 = -eps_m * g0.imag
            lam, err = richardson(eps_m, m0, order)
            settled = abs(m0[-1] - m0[-2]) <= atom_settle * abs(m0[-1])
            if lam > atom_threshold and settled:
                atoms.append(Atom(x0, float(lam), float(err)))
                found = True
            else:
                visited.add(i)
                rejected.append({"x": x0, "extrapolated_mass": float(lam), "masses": m0.tolist(),
                                 "reason": "mass does not settle (integrable blow-up, not a pole)"
                                 if not settled else "extrapolated mass below threshold"})
        if not (found and refinable):
            break
    atoms.sort(key=lambda a: a.position)

    corr = vals.copy()
    for a in atoms:
        corr = corr - a.weight / (x[None, :] + 1j * eps[:, None] - a.position)
    dens, derr = richardson(eps, -corr.imag / np.pi, order)
    converged = derr <= flag_tol * (1.0 + np.abs(dens))
    return InversionResult(x, dens, derr, converged, atoms, rejected, eps)


# --------------------------------------------------------------------------
# F-transform plausibility

@dataclass
class Verdict:
    status: str  # "plausible", "rejected" or "inconclusive"
    reason: str
    witness: Optional[dict] = None


def check_f_transform(samples: TransformGrid, range_tol=1e-12, ratio_tol=0.05,
                      min_ray_height=10.0) -> Verdict:
    """Sampled test of the F-transform characterisation.

    Checks that every sample lies in the closed upper half-plane and that
    ``F(iy) / (iy) -> 1`` along the imaginary axis at the ``O(1/y)`` rate.
    This is a sampled check: a plausible verdict is evidence, not proof.
    """
    z, f = samples.points, samples.values
    bad = np.flatnonzero(f.imag < -range_tol)
    if bad.size:
        k = bad[np.argmin(f.imag[bad])]
        return Verdict("rejected", "range violation: Im F < 0",
                       {"z": complex(z[k]), "F": complex(f[k])})
    ray = np.flatnonzero(np.abs(z.real) <= 1e-12 * np.abs(z))
    if ray.size < 3 or z[ray].imag.max() < min_ray_height:
        return Verdict("inconclusive", f"need >= 3 samples on the imaginary axis reaching "
                                       f"y >= {min_ray_height}")
    order = ray[np.argsort(z[ray].imag)]
    y = z[order].imag
    dev = np.abs(f[order] / (1j * y) - 1.0)
    scaled = y * dev
    if dev[-1] > ratio_tol:
        return Verdict("rejected", "F(iy)/(iy) does not approach 1",
                       {"y": float(y[-1]), "deviation": float(dev[-1])})
    if scaled[-1] > 2.0 * scaled[-2] + 1e-9:
        return Verdict("rejected", "F(iy)/(iy) - 1 decays slower than 1/y",
                       {"y": float(y[-1]), "y_times_deviation": float(scaled[-1])})
    return Verdict("plausible", "range in closed upper half-plane; normalisation holds on ray",
                   {"y_max": float(y[-1]), "deviation": float(dev[-1])})


# --------------------------------------------------------------------------
# Riesz-Herglotz on the disc

@dataclass
class CircleMeasure:
    """Probability measure on the unit circle.

    ``angles``/``weights`` are atoms at ``exp(i angle)``; `density` is an
    optional callable of the angle, integrated against ``dtheta`` on
    ``[0, 2 pi)``.
    """

    angles: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density: Optional[Callable] = None

    def __post_init__(self):
        self.angles = np.atleast_1d(np.asarray(self.angles, dtype=float))
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if self.angles.shape != self.weights.shape:
            raise ValueError("angles and weights must match")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")

    @classmethod
    def uniform(cls):
        return cls(density=lambda th: np.full_like(th, 1.0 / (2 * np.pi)))

    @classmethod
    def from_points(cls, points, weights=None):
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        if weights is None:
            weights = np.full(points.size, 1.0 / points.size)
        return cls(np.angle(points), weights)

    def total_mass(self, n=4096):
        mass = self.weights.sum()
        if self.density is not None:
            th = 2 * np.pi * np.arange(n) / n
            mass += self.density(th).sum() * 2 * np.pi / n
        return float(mass)


def herglotz_caratheodory(boundary_measure: CircleMeasure, z, n_quad=512):
    """``p(z) = int (u + z) / (u - z) mu(du)`` for `z` in the open disc."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(zs) >= 1):
        raise ValueError("z must lie in the open unit disc")
    u = np.exp(1j * boundary_measure.angles)
    kernel = (u[None, :] + zs[:, None]) / (u[None, :] - zs[:, None])
    out = (kernel * boundary_measure.weights).sum(1)
    if boundary_measure.density is not None:
        # periodic trapezoid rule; node count grows as z approaches the circle
        n = int(min(max(n_quad, 64 / (1 - np.abs(zs).max())), 1 << 16))
        th = 2 * np.pi * np.arange(n) / n
        v = np.exp(1j * th)
        w = boundary_measure.density(th) * (2 * np.pi / n)
        out = out + ((v[None, :] + zs[:, None]) / (v[None, :] - zs[:, None]) * w).sum(1)
    return out[0] if np.ndim(z) == 0 else out
