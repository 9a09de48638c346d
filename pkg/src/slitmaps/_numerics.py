"""Small numerical helpers: branch-corrected square roots, extrapolation, quadrature."""

from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ExtrapolationError, QuadratureError

DEFAULT_QUAD_TOL = 1e-10


def hp_sqrt(q, ref):
    """Square root of `q` on the branch that preserves the upper half-plane.

    Of the two roots of `q` the one with positive imaginary part is taken.
    When both roots are real (points on the boundary) the sign is copied from
    ``ref.real``, so that e.g. ``hp_sqrt(z**2 - 4, z)`` behaves like ``z``
    at infinity and is continuous from above on the real axis.
    """
    q = np.asarray(q, dtype=complex)
    ref = np.asarray(ref, dtype=complex)
    # -0.0 imaginary parts would select the lower principal root.
    q = q.real + 1j * (q.imag + 0.0)
    s = np.sqrt(q)
    scale = np.maximum(np.abs(s), 1e-300)
    real_root = np.abs(s.imag) <= 1e-14 * scale
    flip = np.where(real_root,
                    np.sign(s.real) * np.where(ref.real < 0, -1.0, 1.0) < 0,
                    s.imag < 0)
    s = np.where(flip, -s, s)
    return s[()] if s.ndim == 0 else s


def validate_schedule(eps):
    eps = np.asarray(eps, dtype=float)
    if eps.ndim != 1 or eps.size < 2:
        raise ExtrapolationError("need at least two epsilon values")
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ExtrapolationError("epsilon schedule must be positive and strictly decreasing")
    return eps


def richardson(eps, values, order=None):
    """Extrapolate ``values(eps)`` to ``eps -> 0``.

    Polynomial (Neville) extrapolation in `eps` over the finest ``order + 1``
    entries of the schedule. For a ratio-2 schedule this is the classical
    Richardson tableau. ``order=1`` is the linear model; the default uses the
    whole schedule.

    Parameters
    ----------
    eps : array_like, shape (n,)
        Strictly decreasing positive step sizes.
    values : array_like, shape (n, ...)
        Samples; trailing axes are extrapolated independently.

    Returns
    -------
    limit, error : ndarray
        The extrapolated value and the size of the last tableau increment.
    """
    eps = validate_schedule(eps)
    values = np.asarray(values)
    n = eps.size
    if order is None:
        order = n - 1
    order = int(min(max(order, 1), n - 1))
    x = eps[n - order - 1:]
    table = [values[n - order - 1 + i] for i in range(order + 1)]
    diag_prev = table[-1]
    diag = table[-1]
    for level in range(1, order + 1):
        table = [
            (x[i + level] * table[i] - x[i] * table[i + 1]) / (x[i + level] - x[i])
            for i in range(len(table) - 1)
        ]
        diag_prev, diag = diag, table[-1]
    return diag, np.abs(diag - diag_prev)


def quad(func, a, b, tol=DEFAULT_QUAD_TOL, points=None, limit=400, what="integral"):
    """Real adaptive quadrature that raises instead of warning on failure."""
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        kwargs = {"limit": limit, "epsabs": tol * 0.1, "epsrel": tol * 0.1}
        if points is not None:
            pts = [p for p in points if a < p < b]
            if pts:
                kwargs["points"] = sorted(set(pts))
        val, err = integrate.quad(func, a, b, **kwargs)
    if not np.isfinite(val) or err > max(tol, tol * abs(val)):
        raise QuadratureError(f"{what} on [{a:.6g}, {b:.6g}] reached error {err:.3g} > {tol:.3g}")
    return val


def cquad(func, a, b, tol=DEFAULT_QUAD_TOL, points=None, limit=400, what="integral"):
    """Complex-valued version of :func:`quad` (real and imaginary parts separately)."""
    re = quad(lambda t: func(t).real, a, b, tol, points, limit, what)
    im = quad(lambda t: func(t).imag, a, b, tol, points, limit, what)
    return re + 1j * im


@lru_cache(maxsize=16)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(n, a, b):
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _merged(breaks, rel=1e-9):
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if breaks.size < 2:
        raise ValueError("need at least two distinct breaks")
    gap = rel * (breaks[-1] - breaks[0])
    keep = [breaks[0]]
    for p in breaks[1:-1]:
        if p - keep[-1] > gap and breaks[-1] - p > gap:
            keep.append(p)
    keep.append(breaks[-1])
    return np.asarray(keep)


def composite_rule(breaks, order=16, singular=None, merge=1e-9):
    """Composite Gauss-Legendre rule on the pieces between `breaks`.

    Pieces with an end at one of the `singular` points (all pieces when it
    is None) use ``t = lo + (hi - lo)(1 - cos(phi))/2``, which absorbs
    square-root and inverse square-root behaviour at both of their ends.
    Breaks closer than `merge` times the total length are merged.

    Returns
    -------
    nodes, weights : ndarray
    """
    breaks = _merged(breaks, merge)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    if singular is None:
        flag = np.ones(lo.shape, dtype=bool)
    else:
        sing = np.asarray(singular, dtype=float).ravel()
        gap = merge * (breaks[-1] - breaks[0])
        at = np.min(np.abs(breaks[:, None] - sing[None, :]), axis=1) <= gap \
            if sing.size else np.zeros(breaks.size, dtype=bool)
        flag = (at[:-1] | at[1:])[:, None]
    x, w = _leggauss(order)
    phi, wphi = 0.5 * np.pi * (x + 1.0), 0.5 * np.pi * w
    half = 0.5 * (hi - lo)
    nodes = np.where(flag, lo + half * (1.0 - np.cos(phi)), lo + half * (x + 1.0))
    weights = np.where(flag, half * np.sin(phi) * wphi, half * w)
    return nodes.ravel(), weights.ravel()
