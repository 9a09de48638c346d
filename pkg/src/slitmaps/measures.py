"""Probability measures on the real line.

A measure is a finite list of atoms plus a list of density segments. Each
segment carries a closed-form density when one is known and/or samples on a
uniform grid. Integrals against closed-form densities use the substitution
``t = m - r cos(theta)``, which absorbs the inverse square-root blow-up of
arcsine-type densities at the segment ends; sampled densities are integrated
with composite Simpson on their own grid.

The module also holds the classical side: Fourier transforms, classical
convolution and the Levy-Khintchine exponent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.interpolate import CubicSpline

from ._numerics import DEFAULT_QUAD_TOL, quad
from .errors import QuadratureError, ResamplingWarning, SupportError

MASS_TOL = 1e-9
MAX_GRID = 4096


# --------------------------------------------------------------------------
# closed-form densities usable from JSON ("formula" ids)

def _arcsine(t, a, b):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 / (np.pi * np.sqrt((t - a) * (b - t)))
    return np.where((t > a) & (t < b), out, 0.0)


def _semicircle(t, a, b):
    t = np.asarray(t, dtype=float)
    r = 0.5 * (b - a)
    m = 0.5 * (a + b)
    q = np.clip(r * r - (t - m) ** 2, 0.0, None)
    return np.where((t >= a) & (t <= b), 2.0 / (np.pi * r * r) * np.sqrt(q), 0.0)


def _uniform(t, a, b):
    t = np.asarray(t, dtype=float)
    return np.where((t >= a) & (t <= b), 1.0 / (b - a), 0.0)


def _bump(t, a, b, power=4):
    # normalised (1 - u^2)^power on [a, b]
    t = np.asarray(t, dtype=float)
    r = 0.5 * (b - a)
    u = (t - 0.5 * (a + b)) / r
    from math import gamma, pi, sqrt
    norm = r * sqrt(pi) * gamma(power + 1) / gamma(power + 1.5)
    return np.where(np.abs(u) <= 1, np.clip(1 - u * u, 0, None) ** power / norm, 0.0)


FORMULAS = {
    "arcsine": _arcsine,
    "semicircle": _semicircle,
    "uniform": _uniform,
    "bump": _bump,
}


@dataclass
class DensitySegment:
    """Nonnegative density on ``[a, b]``.

    ``func`` is a vectorised closed form (zero outside ``[a, b]`` is *not*
    required; evaluation masks it). ``samples`` are values on
    ``np.linspace(a, b, len(samples))``. At least one of the two must be
    given; when both are present ``func`` wins for evaluation. The optional
    ``rule = (nodes, weights)`` is a fixed quadrature rule on ``[a, b]`` for
    densities with many known weak singularities; it then replaces adaptive
    quadrature in :meth:`integrate` and in grid Hilbert transforms.
    """

    a: float
    b: float
    func: Optional[Callable] = None
    samples: Optional[np.ndarray] = None
    interp: str = "cubic"
    breaks: tuple = ()
    formula: Optional[str] = None
    params: dict = field(default_factory=dict)
    scale: float = 1.0
    rule: Optional[tuple] = None

    def __post_init__(self):
        self.a = float(self.a)
        self.b = float(self.b)
        if not self.a < self.b:
            raise SupportError(f"segment needs a < b, got [{self.a}, {self.b}]")
        if self.func is None and self.samples is None:
            raise ValueError("segment needs a closed form or samples")
        if self.samples is not None:
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 1 or s.size < 3:
                raise QuadratureError("sampled density needs at least 3 samples")
            if not np.all(np.isfinite(s)):
                raise QuadratureError("sampled density contains non-finite values")
            if np.any(s < 0):
                raise ValueError("density samples must be nonnegative")
            self.samples = s
        self._interpolant = None
        self._rule_values = None
        if self.rule is not None:
            nodes, weights = (np.asarray(v, dtype=float) for v in self.rule)
            if nodes.shape != weights.shape or np.any(nodes <= self.a) or np.any(nodes >= self.b):
                raise ValueError("rule nodes must lie strictly inside (a, b)")
            self.rule = (nodes, weights)

    def rule_values(self):
        """``(nodes, weights, d(nodes))`` of the attached rule (cached)."""
        if self._rule_values is None:
            self._rule_values = self(self.rule[0])
        return self.rule[0], self.rule[1], self._rule_values

    @property
    def grid(self):
        if self.samples is None:
            return None
        return np.linspace(self.a, self.b, self.samples.size)

    @property
    def step(self):
        return None if self.samples is None else (self.b - self.a) / (self.samples.size - 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.a) & (t <= self.b)
        if self.func is not None:
            with np.errstate(all="ignore"):
                vals = np.asarray(self.func(t), dtype=float)
        else:
            if self._interpolant is None:
                if self.interp == "linear":
                    grid, s = self.grid, self.samples
                    self._interpolant = lambda x: np.interp(x, grid, s)
                else:
                    self._interpolant = CubicSpline(self.grid, self.samples)
            vals = np.clip(self._interpolant(t), 0.0, None)
        return np.where(inside, vals, 0.0)

    def integrate(self, g=None, tol=DEFAULT_QUAD_TOL, points=()):
        """Return ``int g(t) d(t) dt`` over the segment (``g = 1`` by default)."""
        if g is None:
            g = _one
        if self.func is None:
            x = self.grid
            y = np.asarray(g(x), dtype=float) * self.samples
            if self.interp == "linear":
                return float(sp_integrate.trapezoid(y, x))
            return float(sp_integrate.simpson(y, x=x))
        if self.rule is not None:
            t, w, d = self.rule_values()
            return float(np.sum(np.asarray(g(t), dtype=float) * d * w))
        m = 0.5 * (self.a + self.b)
        r = 0.5 * (self.b - self.a)

        def integrand(th):
            t = m - r * np.cos(th)
            return float(np.squeeze(g(t) * self(t))) * r * np.sin(th)

        pts = [np.arccos(np.clip((m - p) / r, -1, 1)) for p in (*self.breaks, *points)
               if self.a < p < self.b]
        return quad(integrand, 0.0, np.pi, tol=tol, points=pts, what="density integral")

    def shifted(self, c, weight=1.0):
        f = self.func if self.func is not None else self.__call__
        return DensitySegment(
            self.a + c, self.b + c,
            func=(lambda t, f=f: weight * f(np.asarray(t) - c)),
            samples=None if self.samples is None else weight * self.samples,
            interp=self.interp,
            breaks=tuple(p + c for p in self.breaks),
            rule=None if self.rule is None else (self.rule[0] + c, self.rule[1]),
        )

    def resampled(self, n):
        x = np.linspace(self.a, self.b, n)
        return self(x)


def _one(t):
    return np.ones_like(np.asarray(t, dtype=float))


@dataclass
class MeasureSpec:
    """Finite nonnegative measure: atoms plus density segments.

    Probability measures are the common case; Levy measures and the
    Pick-Nevanlinna measure reuse the same encoding without the mass-1
    constraint (see :meth:`require_probability`).
    """

    atoms: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    segments: list = field(default_factory=list)
    label: Optional[str] = None
    tol: float = DEFAULT_QUAD_TOL

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float).reshape(-1, 2)
        if np.any(atoms[:, 1] <= 0):
            raise ValueError("atom weights must be positive")
        order = np.argsort(atoms[:, 0], kind="stable")
        atoms = atoms[order]
        if np.any(np.diff(atoms[:, 0]) == 0):
            raise ValueError("atom positions must be pairwise distinct")
        self.atoms = atoms
        self.segments = sorted(self.segments, key=lambda s: s.a)
        for s1, s2 in zip(self.segments, self.segments[1:]):
            if s2.a < s1.b:
                raise SupportError(f"segments [{s1.a}, {s1.b}] and [{s2.a}, {s2.b}] overlap")

    # -- basic accessors ---------------------------------------------------
    @property
    def positions(self):
        return self.atoms[:, 0]

    @property
    def weights(self):
        return self.atoms[:, 1]

    @property
    def is_atomic(self):
        return not self.segments

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for seg in self.segments:
            out = out + seg(x)
        return out

    def support_bounds(self):
        lo = [*self.positions, *(s.a for s in self.segments)]
        hi = [*self.positions, *(s.b for s in self.segments)]
        if not lo:
            raise SupportError("empty measure")
        return min(lo), max(hi)

    def integrate(self, g, tol=None, points=()):
        """``int g dmu`` for a real or complex vectorised `g`."""
        tol = self.tol if tol is None else tol
        vals = np.asarray(g(self.positions))
        total = np.sum(vals * self.weights) if self.atoms.size else 0.0
        for seg in self.segments:
            probe = np.asarray(g(np.array([0.5 * (seg.a + seg.b)])))
            if np.iscomplexobj(probe):
                re = seg.integrate(lambda t: np.real(g(t)), tol, points)
                im = seg.integrate(lambda t: np.imag(g(t)), tol, points)
                total = total + re + 1j * im
            else:
                total = total + seg.integrate(g, tol, points)
        return total

    def total_mass(self):
        return float(np.sum(self.weights) + sum(s.integrate(tol=self.tol) for s in self.segments))

    def require_probability(self, tol=MASS_TOL):
        mass = self.total_mass()
        if abs(mass - 1.0) > max(tol, 10 * self.tol):
            raise ValueError(f"not a probability measure: total mass {mass!r}")
        return self

    # -- transformations -----------------------------------------------------
    def translate(self, c):
        atoms = self.atoms.copy()
        atoms[:, 0] += c
        segs = []
        for s in self.segments:
            if s.formula is not None:
                segs.append(replace(s, a=s.a + c, b=s.b + c,
                                    func=_formula_func(s.formula, s.a + c, s.b + c, s.params,
                                                       s.scale),
                                    breaks=tuple(p + c for p in s.breaks)))
            else:
                segs.append(s.shifted(c))
        return MeasureSpec(atoms, segs, self.label, self.tol)

    def scaled(self, factor):
        atoms = self.atoms.copy()
        atoms[:, 1] *= factor
        segs = [s.shifted(0.0, factor) for s in self.segments]
        return MeasureSpec(atoms, segs, self.label, self.tol)

    def without_atoms(self):
        return MeasureSpec(np.zeros((0, 2)), list(self.segments), self.label, self.tol)

    def __add__(self, other):
        atoms = _merge_atoms(np.vstack([self.atoms, other.atoms]))
        segs = _merge_pieces([(s.a, s.b, s, s.breaks) for s in (*self.segments, *other.segments)])
        return MeasureSpec(atoms, segs, None, min(self.tol, other.tol))


def _formula_func(name, a, b, params, scale=1.0):
    f = FORMULAS[name]
    if scale == 1.0:
        return lambda t: f(t, a, b, **params)
    return lambda t: scale * f(t, a, b, **params)


def _merge_atoms(atoms, decimals=14):
    if atoms.size == 0:
        return np.zeros((0, 2))
    key = np.round(atoms[:, 0], decimals)
    uniq, inv = np.unique(key, return_inverse=True)
    w = np.zeros(uniq.size)
    pos = np.zeros(uniq.size)
    np.add.at(w, inv, atoms[:, 1])
    np.add.at(pos, inv, atoms[:, 0] * atoms[:, 1])
    keep = w > 0
    return np.column_stack([pos[keep] / w[keep], w[keep]])


def _merge_pieces(pieces, n_samples=1025):
    """Sum possibly overlapping density pieces into disjoint segments."""
    pieces = sorted(pieces, key=lambda p: p[0])
    if not pieces:
        return []
    groups = [[pieces[0]]]
    for p in pieces[1:]:
        if p[0] < max(q[1] for q in groups[-1]):
            groups[-1].append(p)
        else:
            groups.append([p])
    out = []
    for g in groups:
        if len(g) == 1:
            out.append(g[0][2])
            continue
        a = min(p[0] for p in g)
        b = max(p[1] for p in g)
        funcs = [p[2] for p in g]
        brk = sorted({x for p in g for x in (p[0], p[1], *p[3])} - {a, b})

        def f(t, funcs=funcs):
            return sum(fn(t) for fn in funcs)

        out.append(DensitySegment(a, b, func=f, samples=f(np.linspace(a, b, n_samples)),
                                  breaks=tuple(brk)))
    return out


# --------------------------------------------------------------------------
# constructors

def point_mass(c=0.0):
    return MeasureSpec(np.array([[c, 1.0]]), label=f"delta_{c:g}")


def atomic(positions: Sequence[float], weights: Sequence[float], label=None):
    return MeasureSpec(np.column_stack([positions, weights]), label=label)


def from_formula(name, a, b, weight=1.0, label=None, **params):
    seg = DensitySegment(a, b, func=_formula_func(name, a, b, params, weight), formula=name,
                         params=dict(params), scale=float(weight))
    return MeasureSpec(segments=[seg], label=label or name)


def arcsine(a=-2.0, b=2.0):
    """Arcsine law ``1 / (pi sqrt((t-a)(b-t)))``; variance ``(b-a)^2 / 8``."""
    return from_formula("arcsine", a, b)


def semicircle(a=-2.0, b=2.0):
    """Wigner semicircle law on ``[a, b]``."""
    return from_formula("semicircle", a, b)


def uniform(a=0.0, b=1.0):
    return from_formula("uniform", a, b)


def bump(center=0.0, halfwidth=1.0, power=4):
    """Smooth compactly supported density proportional to ``(1-u^2)^power``."""
    return from_formula("bump", center - halfwidth, center + halfwidth, power=power)


def normal(mean=0.0, sigma=1.0, n=4001, width=10.0):
    """Normal law stored as samples on ``mean +- width*sigma``."""
    x = np.linspace(mean - width * sigma, mean + width * sigma, n)
    s = np.exp(-0.5 * ((x - mean) / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
    return MeasureSpec(segments=[DensitySegment(x[0], x[-1], samples=s)], label="normal")


def from_samples(a, b, samples, atoms=None, interp="cubic", label=None):
    seg = DensitySegment(a, b, samples=np.asarray(samples, dtype=float), interp=interp)
    return MeasureSpec(np.zeros((0, 2)) if atoms is None else atoms, [seg], label)


# --------------------------------------------------------------------------
# operations

def moment(mu: MeasureSpec, k: int):
    """Raw moment of order `k`, except ``k == 2`` which returns the variance."""
    if k == 2:
        m1 = mu.integrate(lambda t: t)
        m2 = mu.integrate(lambda t: t * t)
        return float(m2 - m1 * m1)
    return float(mu.integrate(lambda t: t ** k))


def fourier_transform(mu: MeasureSpec, x):
    """``int exp(i x t) mu(dt)``, vectorised over `x`."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([mu.integrate(lambda t, xx=xx: np.exp(1j * xx * t)) for xx in xs], dtype=complex)
    return out[0] if np.ndim(x) == 0 else out


def _cell_masses(seg, edges, tol):
    f = seg.func if seg.func is not None else seg
    masses = np.empty(edges.size - 1)
    for i in range(edges.size - 1):
        lo, hi = edges[i], edges[i + 1]
        lo_c, hi_c = max(lo, seg.a), min(hi, seg.b)
        masses[i] = 0.0 if hi_c <= lo_c else quad(lambda t: float(f(np.array([t]))[0]),
                                                  lo_c, hi_c, tol=tol, what="cell mass")
    return masses


def _density_density(s1, s2, tol):
    h1 = s1.step or (s1.b - s1.a) / 1024
    h2 = s2.step or (s2.b - s2.a) / 1024
    if s1.samples is not None and s2.samples is not None and not np.isclose(h1, h2, rtol=1e-12):
        warnings.warn(f"resampling densities to common step {min(h1, h2):.3g} "
                      f"(steps were {h1:.3g} and {h2:.3g})", ResamplingWarning, stacklevel=3)
    h = min(h1, h2)
    n1 = int(np.ceil((s1.b - s1.a) / h - 1e-9))
    n2 = int(np.ceil((s2.b - s2.a) / h - 1e-9))
    if max(n1, n2) > MAX_GRID:
        h = max(s1.b - s1.a, s2.b - s2.a) / MAX_GRID
        warnings.warn(f"grid capped at {MAX_GRID} cells, step {h:.3g}", ResamplingWarning,
                      stacklevel=3)
        n1 = int(np.ceil((s1.b - s1.a) / h - 1e-9))
        n2 = int(np.ceil((s2.b - s2.a) / h - 1e-9))
    e1 = s1.a + h * np.arange(n1 + 1)
    e2 = s2.a + h * np.arange(n2 + 1)
    m1 = _cell_masses(s1, e1, tol)
    m2 = _cell_masses(s2, e2, tol)
    # convolution of the two histograms is piecewise linear with these nodal values
    nodes = np.concatenate([[0.0], np.convolve(m1, m2) / h, [0.0]])
    a = s1.a + s2.a
    b = a + h * (nodes.size - 1)
    return DensitySegment(a, b, samples=nodes, interp="linear")


def convolve_classical(mu: MeasureSpec, nu: MeasureSpec) -> MeasureSpec:
    """Classical convolution ``mu * nu`` (Fourier transforms multiply)."""
    tol = min(mu.tol, nu.tol)
    xa, wa = mu.positions, mu.weights
    xb, wb = nu.positions, nu.weights
    atoms = np.column_stack([(xa[:, None] + xb[None, :]).ravel(),
                             (wa[:, None] * wb[None, :]).ravel()]) if xa.size and xb.size \
        else np.zeros((0, 2))
    atoms = _merge_atoms(atoms)
    pieces = []
    for x0, w in zip(xa, wa):
        for s in nu.segments:
            t = s.shifted(x0, w)
            pieces.append((t.a, t.b, t, t.breaks))
    for x0, w in zip(xb, wb):
        for s in mu.segments:
            t = s.shifted(x0, w)
            pieces.append((t.a, t.b, t, t.breaks))
    for s1 in mu.segments:
        for s2 in nu.segments:
            t = _density_density(s1, s2, tol)
            pieces.append((t.a, t.b, t, ()))
    return MeasureSpec(atoms, _merge_pieces(pieces), tol=tol)


# --------------------------------------------------------------------------
# Levy-Khintchine

@dataclass
class LevyTriple:
    """Drift `a`, Gaussian part `sigma` and Levy measure `nu`."""

    a: float
    sigma: float
    nu: MeasureSpec = field(default_factory=MeasureSpec)

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if np.any(self.nu.positions == 0.0):
            raise ValueError("Levy measure must not charge 0")
        for s in self.nu.segments:
            if s.a <= 0.0 <= s.b:
                # only t^2 d(t) needs to be integrable near 0
                s.integrate(lambda t: np.minimum(1.0, t * t))

    def __add__(self, other):
        return LevyTriple(self.a + other.a, float(np.hypot(self.sigma, other.sigma)),
                          self.nu + other.nu)


def _compensator(x, cutoff):
    if cutoff == "jump":
        return lambda t: np.exp(1j * x * t) - 1 - 1j * x * t * (np.abs(t) < 1)
    if cutoff == "printed":
        ind = 1.0 if abs(x) < 1 else 0.0
        return lambda t: np.exp(1j * x * t) - 1 - 1j * x * t * ind
    raise ValueError(f"unknown cutoff {cutoff!r}")


def levy_khintchine(triple: LevyTriple, x, cutoff="jump"):
    """Characteristic function from a Levy triple.

    ``cutoff="jump"`` compensates small jumps, ``1_{|t|<1}`` in the jump
    variable `t`; this is the convention under which a Poisson law with jump
    ``|x0| >= 1`` has zero drift. ``cutoff="printed"`` applies the
    indicator to the Fourier variable instead.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size, dtype=complex)
    for i, xx in enumerate(xs):
        g = _compensator(xx, cutoff)
        expo = 1j * triple.a * xx - 0.5 * triple.sigma ** 2 * xx * xx
        if triple.nu.atoms.size or triple.nu.segments:
            expo = expo + triple.nu.integrate(g, points=(-1.0, 1.0))
        out[i] = np.exp(expo)
    return out[0] if np.ndim(x) == 0 else out


def normalize_levy(triple: LevyTriple):
    """Shift the drift to zero. Returns ``(normalized_triple, shift)``.

    Translating a law by `c` adds `c` to its drift, so the normalised triple
    describes ``mu`` translated by ``shift = -a``.
    """
    return LevyTriple(0.0, triple.sigma, triple.nu), -float(triple.a)


def unique_embedding(triple: LevyTriple, tol=1e-12):
    """Decide whether a normalised infinitely divisible law embeds uniquely.

    True exactly for ``nu = 0`` (Dirac or centred normal) and for
    ``sigma = 0, nu = lam * delta_{x0}`` with ``x0 != 0`` (Poisson type).
    Returns ``(flag, diagnostic)``.
    """
    if triple.a != 0:
        raise ValueError("apply normalize_levy first (drift must be 0)")
    nu = triple.nu
    nu_mass = nu.total_mass() if (nu.atoms.size or nu.segments) else 0.0
    if nu_mass <= tol:
        kind = "Dirac at 0" if triple.sigma == 0 else "centred normal"
        return True, f"nu = 0 ({kind})"
    if triple.sigma > 0:
        return False, "sigma > 0 and nu != 0: the Gaussian and jump parts can be run separately"
    if nu.segments:
        return False, "sigma = 0 but nu has a continuous part, so it is not a single atom"
    if nu.positions.size != 1:
        return False, f"sigma = 0 but nu has {nu.positions.size} atoms, not one"
    return True, f"sigma = 0, nu = {nu.weights[0]:g} delta_{nu.positions[0]:g} (Poisson type)"
