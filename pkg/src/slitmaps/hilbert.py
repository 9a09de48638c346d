"""Principal-value and radial Hilbert transforms of measures on the line."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._numerics import composite_rule, gauss_legendre, quad, richardson, validate_schedule
from .cauchy import cauchy_transform
from .errors import ExcludedMassWarning, ProximityError
from .measures import DensitySegment, MeasureSpec

DEFAULT_SCHEDULE = (0.04, 0.02, 0.01, 0.005, 0.0025)


@dataclass
class HilbertEvaluation:
    x: float
    eps: float
    pv_value: float
    radial_value: float
    extrapolated: Optional[tuple] = None

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.extrapolated is not None and self.extrapolated[1] < 0:
            raise ValueError("error estimate must be nonnegative")


def _point(seg, t):
    return float(seg(np.array([t]))[0])


def _segment_pv(seg: DensitySegment, x, eps, tol):
    """``int_{[a,b], |x-t|>eps} d(t) / (x - t) dt``.

    Inside the segment the window is handled by pairing ``x - s`` with
    ``x + s``; the odd singular part cancels and the paired integrand
    ``(d(x-s) - d(x+s)) / s`` stays bounded as ``s -> 0``.
    """
    a, b = seg.a, seg.b
    brk = seg.breaks
    total = 0.0
    if a < x < b:
        S = min(x - a, b - x)
        inner = max(eps, 0.0)
        if inner < S:
            pts = [abs(p - x) for p in brk if inner < abs(p - x) < S]
            total += quad(lambda s: (_point(seg, x - s) - _point(seg, x + s)) / s,
                          inner, S, tol=tol, points=pts, what="paired PV integral")
            lo_gap = x - S
            hi_gap = x + S
        else:
            lo_gap = x - inner
            hi_gap = x + inner
    else:
        lo_gap = x - eps
        hi_gap = x + eps
    # one-sided remainders, where |x - t| is bounded below
    for lo, hi in ((a, min(b, lo_gap)), (max(a, hi_gap), b)):
        if hi - lo > 0:
            pts = [p for p in brk if lo < p < hi]
            total += quad(lambda t: _point(seg, t) / (x - t), lo, hi, tol=tol, points=pts,
                          what="one-sided PV integral")
    return total


def hilbert_pv(mu: MeasureSpec, x, eps, tol=None):
    """Truncated Hilbert transform ``(1/pi) int_{|x-t|>eps} mu(dt) / (x - t)``.

    Atoms inside the window are excluded, as the truncated definition says;
    an :class:`ExcludedMassWarning` reports it.
    """
    if eps <= 0:
        raise ValueError("eps must be positive (use hilbert_transform for the limit)")
    return _hilbert(mu, float(x), float(eps), mu.tol if tol is None else tol)


def _hilbert(mu, x, eps, tol):
    total = 0.0
    for x0, w in mu.atoms:
        if abs(x - x0) > eps:
            total += w / (x - x0)
        else:
            warnings.warn(f"atom at {x0:g} (weight {w:g}) lies inside the window around {x:g} "
                          f"and is excluded", ExcludedMassWarning, stacklevel=3)
    for seg in mu.segments:
        total += _segment_pv(seg, x, eps, tol)
    return total / np.pi


def hilbert_transform(mu: MeasureSpec, x, tol=None):
    """Principal value ``H_mu(x)`` (the ``eps -> 0`` limit, computed directly).

    The paired integrand is bounded at ``s = 0``, so the limit integral is
    taken without a window. Raises :class:`ProximityError` at an atom.
    """
    tol = mu.tol if tol is None else tol
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size)
    for i, xx in enumerate(xs):
        if np.any(np.abs(mu.positions - xx) < 1e-14):
            raise ProximityError(f"H_mu diverges at the atom {xx:g}")
        out[i] = _hilbert(mu, float(xx), 0.0, tol)
    return out[0] if np.ndim(x) == 0 else out


def _segment_pv_grid(seg: DensitySegment, x, n_nodes):
    # subtract d(x) so the integrand (d(t) - d(x)) / (x - t) is bounded, and add
    # back d(x) * log((x - a) / (b - x)) exactly; theta-substitution absorbs
    # inverse square-root endpoint behaviour
    a, b = seg.a, seg.b
    m, r = 0.5 * (a + b), 0.5 * (b - a)
    if seg.rule is not None:
        t, wt, dt = seg.rule_values()
    else:
        th, w = gauss_legendre(n_nodes, 0.0, np.pi)
        t = m - r * np.cos(th)
        wt = w * r * np.sin(th)
        dt = seg(t)
    out = np.zeros(x.size)
    inside = (x > a) & (x < b)
    xo = x[~inside]
    if xo.size:
        with np.errstate(divide="ignore", invalid="ignore"):
            out[~inside] = ((dt * wt)[None, :] / (xo[:, None] - t[None, :])).sum(axis=1)
    xi = x[inside]
    if xi.size:
        dx = seg(xi)
        diff = xi[:, None] - t[None, :]
        near = np.abs(diff) < 1e-9 * r
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (dt[None, :] - dx[:, None]) / diff
        if np.any(near):
            h = 1e-6 * r
            slope = (seg(xi + h) - seg(xi - h)) / (2 * h)
            q = np.where(near, -slope[:, None], q)
        out[inside] = (q * wt[None, :]).sum(axis=1) + dx * np.log((xi - a) / (b - xi))
    return out


def _aligned_rule(seg: DensitySegment, knots):
    # the attached rule is reusable piecewise only if it integrates 1 exactly on
    # every knot interval, i.e. it is composite over the breaks
    if seg.rule is None or knots.size < 3:
        return None
    t, w, d = seg.rule_values()
    piece = np.searchsorted(knots, t)
    lengths = np.bincount(piece, weights=w, minlength=knots.size + 1)[1:knots.size]
    if not np.allclose(lengths, np.diff(knots), rtol=1e-9, atol=0.0):
        return None
    return t, w, d


def _window(knots, xx):
    # widen [knots[lo], knots[hi]] around xx until each neighbouring piece is a
    # quarter of its distance to xx or less, so the fixed rule resolves it
    hi = int(np.searchsorted(knots, xx))
    lo = hi - 1
    while hi < knots.size - 1 and knots[hi] - xx < 4 * (knots[hi + 1] - knots[hi]):
        hi += 1
    while lo > 0 and xx - knots[lo] < 4 * (knots[lo] - knots[lo - 1]):
        lo -= 1
    return lo, hi


def _segment_pv_graded(seg: DensitySegment, x, order=16, levels=4):
    # one point at a time: mesh graded geometrically towards x at the scale of its
    # distance to the nearest endpoint or break, with x itself a mesh point; with
    # a composite attached rule only a window around x is re-meshed
    a, b = seg.a, seg.b
    knots = np.unique(np.concatenate([[a, b], np.asarray(seg.breaks, dtype=float)]))
    fixed = _aligned_rule(seg, knots)
    out = np.empty(x.size)
    for i, xx in enumerate(x):
        dx = float(seg(np.array([xx]))[0])
        total = dx * np.log((xx - a) / (b - xx))
        if fixed is None:
            special, lo, hi = knots, a, b
        else:
            l, h = _window(knots, xx)
            special, lo, hi = knots[l:h + 1], knots[l], knots[h]
            t, w, d = fixed
            outside = (t < lo) | (t > hi)
            total += np.sum(w[outside] * (d[outside] - dx) / (xx - t[outside]))
        gaps = np.abs(special - xx)
        delta = np.min(gaps[gaps > 0])
        k = np.arange(-levels, int(np.ceil(np.log2((hi - lo) / delta))) + 1)
        graded = np.concatenate([xx - delta * 2.0 ** k, xx + delta * 2.0 ** k])
        graded = graded[(graded > lo) & (graded < hi)]
        gap = np.min(np.abs(graded[:, None] - special[None, :]), axis=1)
        graded = graded[gap >= 0.5 * np.abs(graded - xx)]
        t, w = composite_rule(np.concatenate([special, [xx], graded]), order, special,
                              merge=1e-15)
        keep = t != xx
        t, w = t[keep], w[keep]
        total += np.sum(w * (seg(t) - dx) / (xx - t))
        out[i] = total
    return out


def hilbert_on_grid(mu: MeasureSpec, x, n_nodes=2048, near=1e-6):
    """Vectorised ``H_mu`` on many points at once (fixed Gauss-Legendre rule).

    Much faster than :func:`hilbert_transform` and accurate to roughly
    ``1e-8`` for smooth or arcsine-type densities; it is what the slit
    analysis uses on its grids. Points within ``near * (b - a)`` of a segment
    end, where the fixed rule cannot resolve the blow-up, get a per-point
    graded rule instead. Values at atoms are ``nan``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.zeros(x.size)
    for x0, w in mu.atoms:
        with np.errstate(divide="ignore"):
            total = total + np.where(x == x0, np.nan, w / (x - x0))
    for seg in mu.segments:
        vals = _segment_pv_grid(seg, x, n_nodes)
        edge = np.minimum(x - seg.a, seg.b - x)
        close = (edge > 0) & (edge < near * (seg.b - seg.a))
        if np.any(close):
            vals[close] = _segment_pv_graded(seg, x[close])
        total = total + vals
    return total / np.pi


def hilbert_radial(mu: MeasureSpec, x, eps, tol=None):
    """``(1/pi) Re G_mu(x + i eps)``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    g = cauchy_transform(mu, np.asarray(x, dtype=float) + 1j * eps, tol)
    return np.real(g) / np.pi


@dataclass
class PlemeljReport:
    x: float
    eps: np.ndarray
    pv: np.ndarray
    radial: np.ndarray
    pv_limit: float
    pv_error: float
    radial_limit: float
    radial_error: float
    difference: float
    status: str  # "PASS", "FAIL" or "HYPOTHESIS_VIOLATION"
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.status == "PASS"

    def evaluations(self):
        lim = (self.pv_limit, self.pv_error)
        return [HilbertEvaluation(self.x, e, p, r, lim)
                for e, p, r in zip(self.eps, self.pv, self.radial)]


def verify_plemelj(mu: MeasureSpec, x, eps_schedule=DEFAULT_SCHEDULE, tol=1e-5, order=None):
    """Compare the truncated and radial Hilbert sequences as ``eps -> 0``.

    Both sequences are extrapolated independently. An atom near `x` violates
    the hypotheses (continuous density around `x`); the report then says so
    instead of raising, since both sequences stay finite.
    """
    eps = validate_schedule(eps_schedule)
    x = float(x)
    notes = []
    violation = False
    if mu.atoms.size and np.any(np.abs(mu.positions - x) <= 10 * eps[0]):
        violation = True
        notes.append("atom within the epsilon range of x: density not continuous there")
    for seg in mu.segments:
        if min(abs(x - seg.a), abs(x - seg.b)) < 1e-12:
            notes.append("x is a segment endpoint; agreement is reported but not certified")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExcludedMassWarning)
        pv = np.array([hilbert_pv(mu, x, e) for e in eps])
    rad = np.array([float(hilbert_radial(mu, x, e)) for e in eps])
    pv_lim, pv_err = richardson(eps, pv, order)
    rad_lim, rad_err = richardson(eps, rad, order)
    diff = abs(pv_lim - rad_lim)
    if violation:
        status = "HYPOTHESIS_VIOLATION"
    else:
        status = "PASS" if diff <= tol else "FAIL"
    return PlemeljReport(x, eps, pv, rad, float(pv_lim), float(pv_err), float(rad_lim),
                         float(rad_err), float(diff), status, notes)
