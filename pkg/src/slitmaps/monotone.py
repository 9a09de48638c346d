"""Monotone convolution by F-transform composition, and a sampled univalence probe."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.spatial import cKDTree

from .cauchy import DEFAULT_EPS, TransformGrid, cauchy_transform, f_transform, stieltjes_invert
from .errors import ProximityError, RefinementError
from .measures import DensitySegment, MeasureSpec, _merge_atoms

MASS_TOL = 1e-6
DENSITY_TOL = 1e-8
ATOM_FREE_DENSITY = 1e-9


@dataclass
class ConvolutionResult:
    """``mu |> nu`` with the defect of its F-transform on held-out points.

    ``residual`` is ``max |F_result(z) - F_mu(F_nu(z))|`` over
    ``validation_points``, which are disjoint from the inversion grid.
    """

    measure: MeasureSpec
    residual: float
    validation_points: np.ndarray = field(repr=False, default=None)
    mass: float = 1.0
    retreats: int = 0

    def __post_init__(self):
        if not self.residual >= 0:
            raise ValueError("residual must be nonnegative")


def _radius(mu: MeasureSpec):
    lo, hi = mu.support_bounds()
    return max(abs(lo), abs(hi))


def _real_f(mu: MeasureSpec, x):
    """``F_mu`` at real points: ``0`` at an atom, ``nan`` inside a density segment."""
    x = np.asarray(x, dtype=float)
    g = np.zeros(x.shape)
    bad = np.zeros(x.shape, dtype=bool)
    hit = np.zeros(x.shape, dtype=bool)
    if mu.atoms.size:
        diff = x[:, None] - mu.positions[None, :]
        hit = np.any(diff == 0, axis=1)
        g = g + (mu.weights[None, :] / np.where(diff == 0, 1, diff)).sum(1)
    for seg in mu.segments:
        inside = (x >= seg.a) & (x <= seg.b)
        bad |= inside
        if np.any(~inside):
            part = MeasureSpec(np.zeros((0, 2)), [seg], tol=mu.tol)
            g[~inside] = g[~inside] + np.real(np.atleast_1d(cauchy_transform(part, x[~inside])))
    with np.errstate(divide="ignore"):
        out = 1.0 / g
    out[hit] = 0.0
    out[bad] = np.nan
    return out


def _compose(mu, nu, z, budget, step):
    """``F_mu(F_nu(z))`` with per-point retreat off poles of ``G_mu``.

    A point whose image under ``F_nu`` lands on an atom of ``mu`` (or where
    ``G_nu`` vanishes) is nudged sideways by fractions of the grid step.
    Returns the values, the points actually used and the retreat count.
    """
    z = np.asarray(z, dtype=complex).copy()
    try:
        return np.atleast_1d(f_transform(mu, f_transform(nu, z))), z, 0
    except ProximityError:
        pass
    out = np.empty(z.shape, dtype=complex)
    retreats = 0
    for k in range(z.size):
        for attempt in range(budget + 1):
            try:
                out[k] = f_transform(mu, f_transform(nu, z[k]))
                break
            except ProximityError:
                if attempt == budget:
                    raise RefinementError(f"retreat budget exhausted near z = {z[k]:.6g}")
                retreats += 1
                z[k] = z[k] + ((-1) ** attempt) * step / (7.0 + attempt)
    return out, z, retreats


def _real_atoms(mu, nu, lo, hi, n=4001, tol=1e-10):
    """Zeros of the real function ``F_mu(F_nu(x))`` by sign changes and brentq."""
    x = np.linspace(lo, hi, n)

    def comp(t):
        return _real_f(mu, _real_f(nu, np.atleast_1d(t)))

    vals = comp(x)
    atoms = []
    finite = np.isfinite(vals)
    for i in np.flatnonzero(finite[:-1] & finite[1:] & (np.sign(vals[:-1]) != np.sign(vals[1:]))):
        f0, f1 = vals[i], vals[i + 1]
        if f0 == 0:
            x0 = x[i]
        else:
            x0 = optimize.brentq(lambda t: comp(t)[0], x[i], x[i + 1], xtol=1e-15)
        # brentq also converges onto a pole of F (a sign change through infinity)
        if abs(comp(x0)[0]) > tol * max(1.0, abs(f0), abs(f1)):
            continue
        # F is real-analytic at x0, so F'(x0) = Im F(x0 + i h) / h + O(h^2)
        h = 1e-7 * max(1.0, abs(x0))
        slope = np.imag(f_transform(mu, f_transform(nu, x0 + 1j * h))) / h
        if slope > 0:
            atoms.append((float(x0), float(1.0 / slope)))
    return atoms


def _kinks(mu, nu, lo, hi, n=4001):
    """Where the composed density can be non-smooth.

    Edges of the density segments of `nu`, and real points that ``F_nu``
    sends to edges of the density segments of `mu`.
    """
    pts = [p for s in nu.segments for p in (s.a, s.b, *s.breaks)]
    edges = [p for s in mu.segments for p in (s.a, s.b, *s.breaks)]
    if edges:
        x = np.linspace(lo, hi, n)
        fx = _real_f(nu, x)
        for e in edges:
            v = fx - e
            ok = np.isfinite(v[:-1]) & np.isfinite(v[1:]) & (np.sign(v[:-1]) != np.sign(v[1:]))
            for i in np.flatnonzero(ok):
                # a sign change through a pole of F_nu is not a crossing
                if abs(v[i] - v[i + 1]) > 10 * (abs(hi - lo) + abs(e)):
                    continue
                pts.append(optimize.brentq(lambda t: _real_f(nu, [t])[0] - e, x[i], x[i + 1],
                                           xtol=1e-15))
    return tuple(sorted(set(pts)))


def _density_segments(G, inv, embedded, scale, breaks=(), rel=1e-6):
    """Support intervals from the inversion grid, edges refined by bisection.

    The density itself is read off boundary values ``-Im G(x + i eta) / pi``
    at two tiny heights, extrapolated linearly to ``eta = 0``, with the
    `embedded` atoms found by the inversion deflated as well; the grid only
    locates where it is positive. `breaks`
    are candidate points of non-smoothness passed on to the segments.
    """
    # Im F_nu(z) >= Im z keeps F_nu(x + i eta) off the real axis numerically;
    # combining heights eta and 2 eta cancels the O(eta) smearing past edges
    eta = 1e-11 * scale

    def at(t, h):
        g = np.atleast_1d(G(t + 1j * h))
        for x0, w in embedded:
            g = g - w / (t + 1j * h - x0)
        return -g.imag / np.pi

    def density(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.clip(2.0 * at(t, eta) - at(t, 2.0 * eta), 0.0, None)

    dens = inv.density
    peak = float(np.max(dens)) if dens.size else 0.0
    if peak <= ATOM_FREE_DENSITY:
        return []
    cut = rel * peak
    idx = np.flatnonzero(dens > cut)
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
    x = inv.x
    segments = []
    for run in runs:
        # the inversion rings a little past sharp edges: move the run ends
        # until the boundary density itself brackets the cut
        inside = np.flatnonzero(density(x[run]) > cut)
        if inside.size < 2:
            continue
        first, last = run[inside[0]], run[inside[-1]]
        while first > 0 and density(x[first - 1])[0] > cut:
            first -= 1
        while last < x.size - 1 and density(x[last + 1])[0] > cut:
            last += 1
        if segments and x[first] <= segments[-1].b:
            continue
        a = _edge(density, x[max(first - 1, 0)], x[first], cut)
        b = _edge(density, x[min(last + 1, x.size - 1)], x[last], cut)
        inner = tuple(float(p) for p in breaks if a < p < b)
        segments.append(DensitySegment(a, b, func=density, breaks=inner))
    return segments


def _edge(density, outside, inside, cut, iters=60):
    # bisection on "density above cut"
    for _ in range(iters):
        mid = 0.5 * (outside + inside)
        if density(mid)[0] > cut:
            inside = mid
        else:
            outside = mid
        if abs(inside - outside) <= 4e-16 * max(1.0, abs(mid)):
            break
    return 0.5 * (outside + inside)


def monotone_convolve(mu: MeasureSpec, nu: MeasureSpec, grid_n=801, eps_schedule=DEFAULT_EPS,
                      retreat_budget=8, n_validation=40) -> ConvolutionResult:
    """``mu |> nu``, the measure with ``F = F_mu o F_nu``.

    Atoms are the real zeros of ``F_mu o F_nu``, found by sign-change
    bracketing with weights ``1 / (F_mu o F_nu)'(x0)``. The remaining
    density comes from Stieltjes inversion of the deflated Cauchy transform
    on ``grid_n`` points covering ``[-(r_mu + r_nu), r_mu + r_nu]``, where
    ``r`` is the support radius; the support of the result lies there.

    Raises
    ------
    RefinementError
        A grid point could not be moved off a pole of ``G_mu``.
    """
    mu.require_probability()
    nu.require_probability()
    R = _radius(mu) + _radius(nu)
    pad = 0.05 * R + 0.1
    lo, hi = -R - pad, R + pad
    x = np.linspace(lo, hi, grid_n)
    step = x[1] - x[0]

    real = _real_atoms(mu, nu, lo, hi)
    retreats = 0

    def G(z):
        nonlocal retreats
        vals, _, r = _compose(mu, nu, z, retreat_budget, step)
        retreats += r
        out = 1.0 / vals
        for x0, w in real:
            out = out - w / (np.asarray(z) - x0)
        return out

    inv = stieltjes_invert(G, x, eps_schedule)
    embedded = [(a.position, a.weight) for a in inv.atoms]
    found = np.array(real + embedded).reshape(-1, 2)
    segments = _density_segments(G, inv, embedded, hi - lo, _kinks(mu, nu, lo, hi))
    measure = MeasureSpec(_merge_atoms(found), segments, label="monotone convolution",
                          tol=DENSITY_TOL)
    mass = measure.total_mass()

    # held-out points: off the inversion lines, at heights the inversion never used
    rng = np.random.default_rng(0)
    zv = rng.uniform(lo, hi, n_validation) + 1j * rng.uniform(0.2, 2.0, n_validation)
    target, zv, _ = _compose(mu, nu, zv, retreat_budget, step)
    residual = float(np.max(np.abs(np.atleast_1d(f_transform(measure, zv)) - target)))
    return ConvolutionResult(measure, residual, zv, mass, retreats)


# --------------------------------------------------------------------------
# univalence probe
# --------------------------------------------------------------------------

@dataclass
class UnivalenceProbe:
    """Collision witnesses and winding counts of a sampled map.

    A probe only: no witnesses and unit winding counts are evidence of
    injectivity on the sampled region, never a proof, and nothing here says
    anything about surjectivity.
    """

    witnesses: list
    windings: list
    tolerance: float
    is_certificate: bool = False
    notes: list = field(default_factory=list)

    @property
    def injective_on_samples(self):
        return not self.witnesses and all(w["winding"] == 1 for w in self.windings
                                          if w["reliable"])


def _tensor_shape(points):
    xs, ys = np.unique(points.real), np.unique(points.imag)
    if xs.size * ys.size != points.size:
        return None
    order = np.lexsort((points.real, points.imag))
    return xs, ys, order


def _winding(values, target):
    steps = np.angle(np.roll(values, -1) - target) - np.angle(values - target)
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    return int(round(steps.sum() / (2 * np.pi))), float(np.max(np.abs(steps)))


def univalence_probe(transform: TransformGrid, tol=1e-8, min_separation=1e-6, blocks=(2, 2)):
    """Sampled injectivity diagnostics for a half-plane map.

    Parameters
    ----------
    transform : TransformGrid
        Samples ``F(z_k)``. When the points form a full rectangular grid,
        winding counts are computed on the whole rectangle and on a
        ``blocks`` split of it.
    tol : float
        Two samples collide when their images are closer than `tol` while
        the points are at least `min_separation` apart.

    Returns
    -------
    UnivalenceProbe
        ``witnesses`` are dicts with ``z1, z2, F1, F2, distance``. Each
        winding entry counts the solutions of ``F(z) = F(z_c)`` inside a
        sub-rectangle via the argument principle on its sampled boundary,
        ``z_c`` being the sample nearest its centre; ``reliable`` is false
        when consecutive boundary samples turn by more than a right angle.
    """
    z, f = transform.points, transform.values
    tree = cKDTree(np.column_stack([f.real, f.imag]))
    witnesses = []
    for i, j in sorted(tree.query_pairs(r=tol)):
        if abs(z[i] - z[j]) >= min_separation:
            witnesses.append({"z1": complex(z[i]), "z2": complex(z[j]), "F1": complex(f[i]),
                              "F2": complex(f[j]), "distance": float(abs(f[i] - f[j]))})
    windings, notes = [], []
    shape = _tensor_shape(z)
    if shape is None:
        notes.append("points do not form a rectangular grid: winding counts skipped")
    else:
        xs, ys, order = shape
        grid = f[order].reshape(ys.size, xs.size)
        rects = [(0, ys.size - 1, 0, xs.size - 1)]
        by, bx = blocks
        iy = np.linspace(0, ys.size - 1, by + 1).astype(int)
        ix = np.linspace(0, xs.size - 1, bx + 1).astype(int)
        rects += [(iy[p], iy[p + 1], ix[q], ix[q + 1]) for p in range(by) for q in range(bx)]
        for r0, r1, c0, c1 in rects:
            if r1 - r0 < 2 or c1 - c0 < 2:
                continue
            boundary = np.concatenate([grid[r0, c0:c1], grid[r0:r1, c1], grid[r1, c1:c0:-1],
                                       grid[r1:r0:-1, c0]])
            rc, cc = (r0 + r1) // 2, (c0 + c1) // 2
            target = grid[rc, cc]
            count, turn = _winding(boundary, target)
            windings.append({"rectangle": (float(xs[c0]), float(xs[c1]), float(ys[r0]),
                                           float(ys[r1])),
                             "center": complex(xs[cc] + 1j * ys[rc]), "winding": count,
                             "max_turn": turn, "reliable": turn < 0.5 * np.pi})
    notes.append("probe only: diagnostics, not a certificate of univalence or surjectivity")
    return UnivalenceProbe(witnesses, windings, tol, False, notes)
