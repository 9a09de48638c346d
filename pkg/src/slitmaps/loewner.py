"""Radial Loewner equation on the unit disc.

Transition maps solve ``dphi/dt = -phi p(t, phi)`` with ``phi_{s,s}(z) = z``;
chain elements are ``f_s(z) = lim_{t -> inf} e^t phi_{s,t}(z)``. A slit
driven by ``kappa(t)`` on the circle has ``p(t, z) = (kappa - z)/(kappa + z)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .cauchy import CircleMeasure, herglotz_caratheodory
from .errors import DomainError, HorizonError

RTOL = 1e-10
ATOL = 1e-12
SINGULAR_STEP_FRACTION = 0.1
MIN_STEP = 1e-13


class DrivingMode(str, Enum):
    RADIAL = "RadialCircle"
    CHORDAL = "ChordalReal"


class Interpolation(str, Enum):
    LINEAR = "Linear"
    CONSTANT = "PiecewiseConstant"


@dataclass
class DrivingFunction:
    """Sampled driving function.

    Radial values are points on the unit circle and are interpolated linearly
    in the unwrapped angle; chordal values are reals. Outside the time grid
    the end values are held. ``PiecewiseConstant`` takes the value at the
    last grid time not exceeding ``t``.
    """

    time_grid: np.ndarray
    values: np.ndarray
    mode: DrivingMode = DrivingMode.RADIAL
    interpolation: Interpolation = Interpolation.LINEAR

    def __post_init__(self):
        self.mode = DrivingMode(self.mode)
        self.interpolation = Interpolation(self.interpolation)
        t = np.atleast_1d(np.asarray(self.time_grid, dtype=float))
        if t.ndim != 1 or t.size == 0:
            raise ValueError("time grid must be a non-empty 1-d array")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if t[0] < 0:
            raise ValueError("time grid must start at t >= 0")
        if self.mode is DrivingMode.RADIAL:
            v = np.atleast_1d(np.asarray(self.values, dtype=complex))
            if np.any(np.abs(np.abs(v) - 1) > 1e-12):
                raise ValueError("radial driving values must have unit modulus")
            self._angles = np.unwrap(np.angle(v))
        else:
            v = np.atleast_1d(np.asarray(self.values, dtype=complex))
            if np.any(np.abs(v.imag) > 0):
                raise ValueError("chordal driving values must be real")
            v = v.real
        if v.shape != t.shape:
            raise ValueError("time grid and values must have the same length")
        self.time_grid, self.values = t, v

    @classmethod
    def constant(cls, value, mode=DrivingMode.RADIAL, horizon=None):
        grid = [0.0] if horizon is None else [0.0, float(horizon)]
        return cls(np.array(grid), np.full(len(grid), value), mode)

    @classmethod
    def from_angles(cls, times, angles, interpolation=Interpolation.LINEAR):
        return cls(np.asarray(times), np.exp(1j * np.asarray(angles, dtype=float)),
                   DrivingMode.RADIAL, interpolation)

    def _index(self, t):
        return np.clip(np.searchsorted(self.time_grid, t, side="right") - 1, 0,
                       self.time_grid.size - 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        base = self._angles if self.mode is DrivingMode.RADIAL else self.values
        if self.interpolation is Interpolation.CONSTANT or self.time_grid.size == 1:
            v = base[self._index(t)]
        else:
            v = np.interp(t, self.time_grid, base)
        return np.exp(1j * v) if self.mode is DrivingMode.RADIAL else v

    def knots(self):
        return self.time_grid


class FieldVariant(str, Enum):
    SINGLE = "SingleDriving"
    CONVEX = "ConvexCombination"
    MEASURE = "BoundaryMeasureFamily"


@dataclass
class HerglotzFieldSpec:
    """Herglotz vector field ``p(t, z)``.

    Build with :meth:`single`, :meth:`convex`, :meth:`measure_family` or
    :meth:`uniform` rather than directly.
    """

    variant: FieldVariant
    drivers: list = field(default_factory=list)
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    family: Optional[Callable[[float], CircleMeasure]] = None

    def __post_init__(self):
        self.variant = FieldVariant(self.variant)
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if self.variant is FieldVariant.MEASURE:
            if self.family is None:
                raise ValueError("measure-family field needs a family callable")
            return
        if not self.drivers or len(self.drivers) != self.weights.size:
            raise ValueError("need one weight per driving function")
        if any(d.mode is not DrivingMode.RADIAL for d in self.drivers):
            raise ValueError("radial Loewner fields need circle-valued drivers")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")

    @classmethod
    def single(cls, kappa: DrivingFunction):
        return cls(FieldVariant.SINGLE, [kappa], np.ones(1))

    @classmethod
    def convex(cls, pairs):
        drivers = [k for k, _ in pairs]
        return cls(FieldVariant.CONVEX, drivers, np.array([w for _, w in pairs], dtype=float))

    @classmethod
    def measure_family(cls, family):
        return cls(FieldVariant.MEASURE, family=family)

    @classmethod
    def uniform(cls):
        measure = CircleMeasure.uniform()
        return cls.measure_family(lambda t: measure)

    def __call__(self, t, z):
        z = np.asarray(z, dtype=complex)
        if self.variant is FieldVariant.MEASURE:
            return np.reshape(herglotz_caratheodory(self.family(t), z.ravel()), z.shape)
        out = np.zeros(z.shape, dtype=complex)
        for kappa, w in zip(self.drivers, self.weights):
            k = kappa(t)
            out = out + w * (k - z) / (k + z)
        return out

    def singular_points(self, t):
        """Poles of ``p(t, .)`` on the circle (``-kappa`` per driver)."""
        if self.variant is FieldVariant.MEASURE:
            measure = self.family(t)
            return np.exp(1j * measure.angles)
        return np.array([-kappa(t) for kappa in self.drivers], dtype=complex)

    def knots(self):
        if self.variant is FieldVariant.MEASURE:
            return np.zeros(0)
        return np.unique(np.concatenate([d.knots() for d in self.drivers]))

    def check(self, times, radius=0.9, n=64):
        """Sampled check that ``Re p > 0`` on a circle and ``p(t, 0) = 1``."""
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        worst_re, worst_norm = np.inf, 0.0
        for t in np.atleast_1d(times):
            worst_re = min(worst_re, float(np.min(self(t, z).real)))
            worst_norm = max(worst_norm, float(abs(self(t, np.zeros(1))[0] - 1)))
        return worst_re > 0 and worst_norm < 1e-10, {"min_real_part": worst_re,
                                                     "normalization_defect": worst_norm}


def evaluate_field(field: HerglotzFieldSpec, t, z):
    """``p(t, z)`` for `z` in the open disc."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise DomainError("z must lie in the open unit disc")
    return field(t, z)


@dataclass
class TransitionResult:
    values: np.ndarray
    t_reached: float
    complete: bool
    message: str = ""


def _integrate(rhs, field, y0, t0, t1, to_phi, rtol, atol):
    """Chunked DOP853 run whose step cap follows the nearest field pole."""
    y = np.asarray(y0, dtype=complex).copy()
    t = t0
    cuts = [k for k in field.knots() if t0 < k < t1]
    stops = [*cuts, t1]
    for stop in stops:
        while t < stop:
            poles = field.singular_points(t)
            if poles.size:
                dist = np.min(np.abs(to_phi(t, y)[:, None] - poles[None, :]))
                cap = SINGULAR_STEP_FRACTION * dist
            else:
                cap = np.inf
            if cap < MIN_STEP:
                return y, t, False, f"step underflow near the field singularity at t = {t:.6g}"
            # a chunk of a few capped steps, so the cap is refreshed as w moves
            end = min(stop, t + (50 * cap if np.isfinite(cap) else stop - t))
            sol = solve_ivp(rhs, (t, end), y, method="DOP853", rtol=rtol, atol=atol,
                            max_step=cap if np.isfinite(cap) else np.inf)
            if not sol.success:
                return y, t, False, sol.message
            y = sol.y[:, -1]
            t = end
    return y, t, True, ""


def solve_transition(field: HerglotzFieldSpec, s, t, z, rtol=RTOL, atol=ATOL):
    """Transition map ``phi_{s,t}(z)`` from Loewner's ODE.

    Returns a :class:`TransitionResult`; if the step size underflows near a
    pole of the field the values at the reached time are returned with
    ``complete = False``.
    """
    if not 0 <= s <= t:
        raise DomainError("need 0 <= s <= t")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z) >= 1):
        raise DomainError("z must lie in the open unit disc")
    if t == s:
        return TransitionResult(z.copy(), t, True)

    def rhs(time, w):
        return -w * field(time, w)

    y, reached, ok, msg = _integrate(rhs, field, z, s, t, lambda _t, w: w, rtol, atol)
    return TransitionResult(y, reached, ok, msg)


@dataclass
class ChainResult:
    values: np.ndarray
    error: np.ndarray
    horizon: float
    history: list

    def empirical_rate(self):
        """Ratio of successive horizon differences (``~e^{-T}`` decay expected)."""
        diffs = [h["max_change"] for h in self.history if h["max_change"] is not None]
        return [b / a for a, b in zip(diffs, diffs[1:]) if a > 0]


def chain_initial(field: HerglotzFieldSpec, s, z, horizon=8.0, max_horizon=64.0, tol=1e-6,
                  rtol=RTOL, atol=ATOL):
    """Chain element ``f_s(z) = lim_{t -> inf} e^t phi_{s,t}(z)``.

    Integrates ``psi = e^{t-s} phi``, which obeys
    ``dpsi/dt = psi (1 - p(t, e^{-(t-s)} psi))`` and settles as ``t`` grows,
    then doubles the horizon ``T = t - s`` from `horizon` until successive
    values differ by less than `tol` or `max_horizon` is passed.

    Raises
    ------
    HorizonError
        The doublings did not converge; the exception message lists the
        per-horizon changes.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z) >= 1):
        raise DomainError("z must lie in the open unit disc")
    if s < 0:
        raise DomainError("need s >= 0")

    def to_phi(t, psi):
        return np.exp(-(t - s)) * psi

    def rhs(t, psi):
        return psi * (1.0 - field(t, to_phi(t, psi)))

    scale = np.exp(s)
    psi, t_now, T = z.copy(), s, float(horizon)
    prev = None
    history = []
    while True:
        psi, reached, ok, msg = _integrate(rhs, field, psi, t_now, s + T, to_phi, rtol, atol)
        if not ok:
            raise HorizonError(f"integration stopped at t = {reached:.6g}: {msg}")
        t_now = s + T
        vals = scale * psi
        change = None if prev is None else np.abs(vals - prev)
        history.append({"horizon": T, "max_change": None if change is None
                        else float(np.max(change))})
        if change is not None and np.max(change) < tol:
            return ChainResult(vals, change, T, history)
        if 2 * T > max_horizon:
            raise HorizonError(
                "horizon doubling did not converge: "
                + ", ".join(f"T={h['horizon']:g}: {h['max_change']}" for h in history))
        prev = vals
        T *= 2


def chain_derivative_jump(field: HerglotzFieldSpec, z, s, h=1e-3):
    """One-sided difference quotients of ``s -> f_s(z)`` and their gap.

    Returns ``(left, right, jump)`` with ``left = (f_s - f_{s-h}) / h`` and
    ``right = (f_{s+h} - f_s) / h``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    vals = [chain_initial(field, t, z, tol=1e-9).values for t in (s - h, s, s + h)]
    left = (vals[1] - vals[0]) / h
    right = (vals[2] - vals[1]) / h
    return left, right, np.abs(right - left)
