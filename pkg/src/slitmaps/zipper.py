"""Chordal slit encoding by composing vertical-slit maps.

A vertical slit from ``xi`` to ``xi + i h`` is erased by

    g(w) = xi + sqrt((w - xi)^2 + h^2),    g^{-1}(z) = xi + sqrt((z - xi)^2 - h^2),

with the square-root branch that preserves the upper half-plane. Near
infinity ``g^{-1}(z) = z - (h^2 / 2) / z + ...``, so each step adds half-plane
capacity ``h^2 / 2`` in the convention ``F(z) = z - c/z + O(z^-2)``.

Encoding walks along the polyline, maps the next point ``p`` with the maps so
far, and erases the vertical slit under it (``xi = Re p``, ``h = Im p``). The
composed inverse ``F = g_1^{-1} o ... o g_n^{-1}`` maps the half-plane onto the
half-plane minus the (approximated) slit and is an F-transform.
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ._numerics import _merged, composite_rule, hp_sqrt
from .cauchy import stieltjes_invert
from .errors import DomainError, GeometryError, RefinementError
from .loewner import DrivingFunction, DrivingMode, Interpolation
from .measures import DensitySegment, MeasureSpec

MAX_STEPS = 20000
SLIT_MEASURE_TOL = 1e-8


def _segments_cross(p1, p2, q1, q2, tol=1e-12):
    """Vectorised proper/touching intersection test of segments p1p2 and q1q2."""
    def cross(a, b):
        return a.real * b.imag - a.imag * b.real

    d1 = cross(q2 - q1, p1 - q1)
    d2 = cross(q2 - q1, p2 - q1)
    d3 = cross(p2 - p1, q1 - p1)
    d4 = cross(p2 - p1, q2 - p1)
    proper = (d1 * d2 < -tol) & (d3 * d4 < -tol)

    def on_seg(a, b, c, d):
        return (np.abs(d) <= tol) & (np.minimum(a.real, b.real) - tol <= c.real) & \
            (c.real <= np.maximum(a.real, b.real) + tol) & \
            (np.minimum(a.imag, b.imag) - tol <= c.imag) & (c.imag <= np.maximum(a.imag, b.imag) + tol)

    touch = on_seg(q1, q2, p1, d1) | on_seg(q1, q2, p2, d2) | on_seg(p1, p2, q1, d3) | \
        on_seg(p1, p2, q2, d4)
    return proper | touch


def find_self_intersection(vertices):
    """First pair ``(i, j)`` of non-adjacent crossing edges, or ``None``."""
    v = np.asarray(vertices, dtype=complex)
    n = v.size - 1
    for i in range(n - 2):
        j = np.arange(i + 2, n)
        hit = _segments_cross(v[i], v[i + 1], v[j], v[j + 1])
        if np.any(hit):
            return i, int(j[np.argmax(hit)])
    # a repeated point between adjacent edges (backtracking) also breaks simplicity
    e = np.diff(v)
    back = np.flatnonzero((np.abs(np.angle(e[1:] / e[:-1])) > np.pi - 1e-12) if n > 1 else [])
    if back.size:
        return int(back[0]), int(back[0]) + 1
    return None


@dataclass
class SlitPolyline:
    """Simple polyline from a real base point into the upper half-plane."""

    vertices: np.ndarray
    check: bool = True
    self_intersection: Optional[tuple] = field(default=None, init=False)

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.vertices, dtype=complex))
        if v.ndim != 1 or v.size < 2:
            raise GeometryError("a slit needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("vertices must be finite")
        if abs(v[0].imag) > 1e-14:
            raise GeometryError("first vertex must lie on the real line")
        v[0] = v[0].real
        if np.any(v[1:].imag <= 0):
            raise GeometryError("all vertices after the base must have positive imaginary part")
        if np.any(np.abs(np.diff(v)) == 0):
            raise GeometryError("consecutive vertices must differ")
        self.vertices = v
        self.self_intersection = find_self_intersection(v)
        if self.check and self.self_intersection is not None:
            i, j = self.self_intersection
            raise GeometryError(f"polyline is not simple: edges {i} and {j} intersect")

    @property
    def simple(self):
        return self.self_intersection is None

    @property
    def base(self):
        return float(self.vertices[0].real)

    @property
    def tip(self):
        return complex(self.vertices[-1])

    def length(self):
        return float(np.sum(np.abs(np.diff(self.vertices))))

    def point_at(self, s):
        """Point at arclength `s` (vectorised)."""
        cum = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(self.vertices)))])
        s = np.clip(np.asarray(s, dtype=float), 0, cum[-1])
        re = np.interp(s, cum, self.vertices.real)
        im = np.interp(s, cum, self.vertices.imag)
        return re + 1j * im

    def translate(self, c):
        return SlitPolyline(self.vertices + c, self.check)

    @classmethod
    def vertical(cls, base, height):
        return cls(np.array([base, base + 1j * height]))


@dataclass
class CapacityRecord:
    increments: np.ndarray
    total_c: float = field(init=False)

    def __post_init__(self):
        inc = np.atleast_1d(np.asarray(self.increments, dtype=float))
        if inc.size == 0 or np.any(inc <= 0):
            raise ValueError("capacity increments must be positive")
        self.increments = inc
        self.total_c = float(np.sum(inc))

    @property
    def times(self):
        return np.concatenate([[0.0], np.cumsum(self.increments)])


@dataclass
class SlitMap:
    """Composition of vertical-slit maps ``F = g_1^{-1} o ... o g_n^{-1}``."""

    xi: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        self.h = np.atleast_1d(np.asarray(self.h, dtype=float))
        if self.xi.shape != self.h.shape or np.any(self.h <= 0):
            raise ValueError("need matching xi and positive h")

    @property
    def capacity(self):
        return float(np.sum(self.h ** 2) / 2)

    def forward(self, w, start=0, stop=None):
        """``g_stop o ... o g_{start+1}`` (0-based slice of the steps)."""
        w = np.asarray(w, dtype=complex)
        for xi, h in zip(self.xi[start:stop], self.h[start:stop]):
            w = xi + hp_sqrt((w - xi) ** 2 + h * h, w - xi)
        return w

    def inverse(self, z, start=0, stop=None):
        """``g_{start+1}^{-1} o ... o g_stop^{-1}``."""
        z = np.asarray(z, dtype=complex)
        stop = self.xi.size if stop is None else stop
        for k in range(stop - 1, start - 1, -1):
            xi, h = self.xi[k], self.h[k]
            z = xi + hp_sqrt((z - xi) ** 2 - h * h, z - xi)
        return z

    def __call__(self, z):
        return self.inverse(z)

    def derivative(self, z):
        """``F'(z)`` by the chain rule (``(g^{-1})'(z) = (z - xi) / sqrt(...)``)."""
        z = np.asarray(z, dtype=complex)
        der = np.ones_like(z)
        for k in range(self.xi.size - 1, -1, -1):
            xi, h = self.xi[k], self.h[k]
            root = hp_sqrt((z - xi) ** 2 - h * h, z - xi)
            der = der * (z - xi) / root
            z = xi + root
        return der

    def cauchy(self, z):
        """``G = 1 / F``."""
        return 1.0 / self.inverse(z)


def capacity_coefficient(slit_map: SlitMap, y):
    """``Im(y (F(iy) - iy))``, which tends to the half-plane capacity."""
    y = np.asarray(y, dtype=float)
    return np.imag(y * (slit_map(1j * y) - 1j * y))


def encode_slit(slit: SlitPolyline, max_increment=None, max_step_length=None,
                max_steps=MAX_STEPS):
    """Driving function and capacity record of a polyline slit.

    The polyline is walked by arclength; a step is halved while its image
    does not stand on the previously erased piece or its capacity increment
    exceeds `max_increment` (default ``L^2 / 100`` for a slit of
    length ``L``, i.e. 2% of a vertical slit of that length) and every step is
    at most `max_step_length` long (default ``L / 200``). Each polyline vertex is hit exactly.

    Returns
    -------
    kappa : DrivingFunction
        Chordal, piecewise constant in capacity time: ``kappa`` equals
        ``xi_k`` on ``[t_{k-1}, t_k)`` (the last value is repeated at ``t_n``).
    capacity : CapacityRecord
    """
    if not isinstance(slit, SlitPolyline):
        slit = SlitPolyline(slit)
    L = slit.length()
    if max_step_length is None:
        max_step_length = L / 200
    if max_increment is None:
        max_increment = L * L / 100
    slit = with_stem(slit, 0.25 * max_step_length)
    L = slit.length()
    cum = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(slit.vertices)))])
    xi, h = [], []
    s = 0.0
    step = cum[1]
    while s < L * (1 - 1e-14):
        nxt = cum[np.searchsorted(cum, s * (1 + 1e-14) + 1e-300, side="right")]
        target = min(s + step, nxt, L)
        while True:
            p = complex(_forward_steps(xi, h, slit.point_at(target)))
            if p.imag <= 0:
                raise GeometryError(f"slit point at arclength {target:.6g} maps onto the axis")
            # the new vertical piece must stand on the image of the previous
            # piece, otherwise it grows from the real line and the hull splits
            attached = not xi or abs(p.real - xi[-1]) < 0.9 * h[-1]
            small = p.imag ** 2 / 2 <= max_increment
            if (attached and small) or target - s < 1e-12 * L:
                break
            target = s + 0.5 * (target - s)
        if xi and abs(p.real - xi[-1]) >= h[-1]:
            raise RefinementError(f"step at arclength {s:.6g} cannot be attached to the hull")
        xi.append(p.real)
        h.append(p.imag)
        if len(xi) > max_steps:
            raise RefinementError(f"tip not reached within {max_steps} steps "
                                  f"(arclength {s:.6g} of {L:.6g})")
        step = min(1.5 * (target - s), max_step_length)
        s = target
    incr = np.asarray(h) ** 2 / 2
    cap = CapacityRecord(incr)
    values = np.concatenate([xi, [xi[-1]]])
    kappa = DrivingFunction(cap.times, values, DrivingMode.CHORDAL, Interpolation.CONSTANT)
    return kappa, cap


def with_stem(slit: SlitPolyline, height):
    """Prepend a vertical stem of the given height at the base when needed.

    Vertical-slit maps can only erase a first piece that stands vertically on
    the base point; a tilted first edge is replaced by a stem of `height`
    followed by the straight edge from the stem tip to the first vertex. The
    curve moves by at most `height`.
    """
    v = slit.vertices
    first = v[1] - v[0]
    if abs(first.real) <= 1e-12 * abs(first):
        return slit
    height = min(height, 0.25 * abs(first), 0.5 * first.imag)
    stem = v[0] + 1j * height
    return SlitPolyline(np.concatenate([[v[0], stem], v[1:]]), slit.check)


def _hp_sqrt_scalar(q, ref):
    r = cmath.sqrt(complex(q.real, q.imag + 0.0))
    if abs(r.imag) <= 1e-14 * abs(r):
        return -r if (r.real < 0) != (ref.real < 0) else r
    return -r if r.imag < 0 else r


def _forward_steps(xi, h, w):
    # scalar path of SlitMap.forward; encoding calls it once per step
    w = complex(w)
    for a, b in zip(xi, h):
        w = a + _hp_sqrt_scalar((w - a) ** 2 + b * b, w - a)
    return w


def slit_map_from_driving(kappa: DrivingFunction, capacity: Optional[CapacityRecord] = None,
                          n_steps=None):
    """The composed map of a chordal driving function.

    With a capacity record the steps are taken from it (and must agree with
    the time grid); otherwise the time grid itself defines the steps, or
    `n_steps` equal-capacity steps over its span.
    """
    if kappa.mode is not DrivingMode.CHORDAL:
        raise DomainError("slit maps need a chordal (real-valued) driving function")
    if capacity is not None:
        times = capacity.times
        if kappa.time_grid.size == times.size and not np.allclose(kappa.time_grid, times,
                                                                   rtol=1e-12, atol=1e-15):
            raise DomainError("driving time grid and capacity record disagree")
    elif n_steps is not None:
        times = np.linspace(kappa.time_grid[0], kappa.time_grid[-1], int(n_steps) + 1)
    else:
        times = kappa.time_grid
    if times.size < 2:
        raise DomainError("need at least one capacity step")
    inc = np.diff(times)
    # each step uses kappa in the middle of its capacity interval
    xi = kappa(times[:-1] + 0.5 * inc)
    return SlitMap(np.asarray(xi, dtype=float), np.sqrt(2 * inc))


def decode_driving(kappa: DrivingFunction, capacity: Optional[CapacityRecord] = None,
                   n_steps=None):
    """Trace the hull tip of a chordal driving function.

    Step ``k`` erases ``[xi_k, xi_k + i h_k]``; its tip in the original
    plane is ``g_1^{-1} o ... o g_{k-1}^{-1}(xi_k + i h_k)``. The trace starts
    at ``xi_1``. A self-intersecting trace is returned with ``simple = False``
    (a non-slit outcome), not raised.
    """
    fmap = slit_map_from_driving(kappa, capacity, n_steps)
    tips = np.empty(fmap.xi.size, dtype=complex)
    for k in range(fmap.xi.size):
        tips[k] = complex(fmap.inverse(fmap.xi[k] + 1j * fmap.h[k], 0, k))
    trace = np.concatenate([[fmap.xi[0]], tips])
    return SlitPolyline(trace, check=False)


def hausdorff(a, b, spacing=None):
    """Hausdorff distance between two point clouds in the plane.

    With `spacing` both inputs are read as polylines and densified first, so
    the result measures the curves rather than their vertex sets.
    """
    a = np.asarray(getattr(a, "vertices", a), dtype=complex).ravel()
    b = np.asarray(getattr(b, "vertices", b), dtype=complex).ravel()
    if spacing is not None:
        a, b = densify(a, spacing), densify(b, spacing)
    from scipy.spatial.distance import directed_hausdorff

    pa = np.column_stack([a.real, a.imag])
    pb = np.column_stack([b.real, b.imag])
    return max(directed_hausdorff(pa, pb)[0], directed_hausdorff(pb, pa)[0])


def densify(points, spacing):
    """Insert points along a polyline so consecutive points are ``<= spacing`` apart."""
    v = np.asarray(points, dtype=complex)
    out = [v[:1]]
    for p, q in zip(v[:-1], v[1:]):
        n = max(int(np.ceil(abs(q - p) / spacing)), 1)
        out.append(p + (q - p) * np.arange(1, n + 1) / n)
    return np.concatenate(out)


class CayleyDirection(str, Enum):
    DISC_TO_HALF_PLANE = "DiscToHalfPlane"
    HALF_PLANE_TO_DISC = "HalfPlaneToDisc"


def cayley(z, direction=CayleyDirection.DISC_TO_HALF_PLANE):
    """Cayley transform between the unit disc and the upper half-plane.

    ``DiscToHalfPlane``: ``z -> i (1 + z) / (1 - z)``, sending ``0 -> i``,
    ``-1 -> 0``, ``i -> -1``, ``-i -> 1`` and ``1 -> infinity``.
    ``HalfPlaneToDisc`` is its inverse ``w -> (w - i) / (w + i)``.

    Raises
    ------
    DomainError
        At the pole (``z = 1``, resp. ``w = -i``) or outside the closed
        source domain.
    """
    direction = CayleyDirection(direction)
    z = np.asarray(z, dtype=complex)
    if direction is CayleyDirection.DISC_TO_HALF_PLANE:
        if np.any(np.abs(z) > 1 + 1e-12):
            raise DomainError("point outside the closed unit disc")
        if np.any(np.abs(1 - z) < 1e-15):
            raise DomainError("z = 1 maps to infinity")
        out = 1j * (1 + z) / (1 - z)
    else:
        if np.any(z.imag < -1e-12):
            raise DomainError("point below the real line")
        if np.any(np.abs(z + 1j) < 1e-15):
            raise DomainError("w = -i is the pole")
        out = (z - 1j) / (z + 1j)
    return out[()] if out.ndim == 0 else out


@dataclass
class SlitMeasureInfo:
    """Byproducts of :func:`slit_to_measure`."""

    slit_map: SlitMap
    capacity: CapacityRecord
    a: float
    b: float
    u: float
    atom: Optional[tuple]
    inversion: object


def _boundary_density(fmap: SlitMap, x):
    # boundary values of F are exact: the branch rule extends each g^{-1}
    # continuously to the real line
    with np.errstate(divide="ignore", invalid="ignore"):
        g = 1.0 / fmap(np.asarray(x, dtype=float) + 0j)
    return np.clip(-g.imag / np.pi, 0.0, None)


def joint_preimages(fmap: SlitMap):
    """Real preimages of the joints between erased pieces, sorted.

    The base of piece ``k`` splits into ``xi_k -/+ h_k`` under ``g_k``; the
    remaining maps carry those to the real line of the final plane. The
    density is analytic between consecutive joints.
    """
    pts = []
    for k in range(fmap.xi.size):
        for side in (-1.0, 1.0):
            w = complex(fmap.xi[k] + side * fmap.h[k])
            w = _forward_steps(fmap.xi[k + 1:], fmap.h[k + 1:], w)
            pts.append(w.real)
    pts.append(float(fmap.xi[-1]))
    return np.unique(np.asarray(pts))


def slit_to_measure(slit, encode_options=None, rule_order=16, inversion_grid_n=401,
                    return_info=False):
    """Probability measure whose F-transform is the encoded slit map.

    The support ``[a, b]`` consists of the two preimages of the base point,
    ``u`` is the preimage of the tip, and when the slit does not start at 0
    the atom sits at ``x0 = F^{-1}(0)`` with weight ``1 / F'(x0)``. The
    density is ``-Im(1/F(x))/pi`` from exact boundary values of the composed
    map; it carries a composite quadrature rule with breaks at the joint
    preimages. ``stieltjes_invert`` is run on ``1/F`` as a cross-check; its
    result is attached to the returned info.
    """
    if not isinstance(slit, SlitPolyline):
        slit = SlitPolyline(slit)
    kappa, cap = encode_slit(slit, **(encode_options or {}))
    fmap = slit_map_from_driving(kappa, cap)
    xi1, h1 = fmap.xi[0], fmap.h[0]
    a = float(np.real(fmap.forward(xi1 - h1 + 0j, 1)))
    b = float(np.real(fmap.forward(xi1 + h1 + 0j, 1)))
    u = float(fmap.xi[-1])
    atoms = np.zeros((0, 2))
    atom = None
    if xi1 != 0.0:
        x0 = float(np.real(fmap.forward(0j)))
        lam = float(np.real(1.0 / fmap.derivative(x0 + 0j)))
        atom = (x0, lam)
        atoms = np.array([atom])
    breaks = joint_preimages(fmap)
    # joints crowd the endpoints; keep all but exact duplicates
    knots = _merged(np.concatenate([[a], breaks[(breaks > a) & (breaks < b)], [b]]), 1e-12)
    breaks = knots[1:-1]
    rule = composite_rule(knots, rule_order, merge=1e-12)
    seg = DensitySegment(a, b, func=lambda t, fmap=fmap: _boundary_density(fmap, t), rule=rule,
                         breaks=tuple(breaks))
    pad = 0.1 * (b - a)
    ends = [a, b] + ([atom[0]] if atom else [])
    lo, hi = min(ends) - pad, max(ends) + pad
    grid = np.linspace(lo, hi, inversion_grid_n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        inversion = stieltjes_invert(fmap.cauchy, grid)
    # the density has a weak singularity at every joint; adaptive quadrature
    # error estimates on it bottom out well above the 1e-10 default
    mu = MeasureSpec(atoms, [seg], label="slit measure", tol=SLIT_MEASURE_TOL)
    if return_info:
        return mu, SlitMeasureInfo(fmap, cap, a, b, u, atom, inversion)
    return mu


def random_slit(rng, n_vertices=20, base=0.0, step=0.25, max_turn=0.9, max_tries=1000):
    """Random simple polyline: a persistent walk that keeps a positive height.

    Parameters
    ----------
    rng : numpy.random.Generator
    n_vertices : int
        Total number of vertices including the base point.
    """
    for _ in range(max_tries):
        angle = np.pi / 2 + rng.uniform(-0.5, 0.5)
        pts = [complex(base)]
        for _ in range(n_vertices - 1):
            angle = np.clip(angle + rng.uniform(-max_turn, max_turn), 0.25, np.pi - 0.25)
            pts.append(pts[-1] + step * rng.uniform(0.5, 1.5) * np.exp(1j * angle))
        v = np.array(pts)
        if np.all(v[1:].imag > 0) and find_self_intersection(v) is None:
            return SlitPolyline(v)
    raise RefinementError("could not draw a simple random slit")
