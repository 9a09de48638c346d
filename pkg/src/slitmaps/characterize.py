"""Slit-measure characterization: condition checks, welding, curve and atom recovery.

A probability measure whose F-transform maps the upper half-plane onto the
half-plane minus a slit has one of two shapes:

* slit starting at ``C != 0``: a density on ``[a, b]`` vanishing at both ends
  plus one atom ``x0`` outside, with ``H_mu(a) = H_mu(b) = 1 / (pi C)``;
* slit starting at ``0``: a density on ``[a, b]`` only, where ``d`` or
  ``|H_mu|`` blows up at the endpoints.

In both cases a decreasing *welding* homeomorphism ``h`` of ``[a, b]`` must
preserve the pair ``(d, H_mu)``, and the slit is traced by
``gamma(x) = 1 / (pi (H_mu(x) - i d(x)))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import GeometryError, NoWeldingError, SingularPointError, SupportError
from .hilbert import hilbert_on_grid
from .measures import DensitySegment, MeasureSpec

DEFAULT_GRID_N = 801
EDGE_FRACTION = 0.02
# sampled side lengths of a true slit differ by about 1% (squeezed pieces at
# the endpoints are under-resolved); a grossly unbalanced curve is no slit
BALANCE_TOL = 0.05


class SlitCase(str, Enum):
    NONZERO_C = "NonzeroC"
    ZERO_C = "ZeroC"
    REJECTED = "Rejected"


@dataclass
class Clause:
    name: str
    passed: bool
    evidence: dict = field(default_factory=dict)
    witness: Optional[dict] = None

    def to_dict(self):
        out = {"passed": bool(self.passed), "evidence": _plain(self.evidence)}
        if self.witness is not None:
            out["witness"] = _plain(self.witness)
        return out


@dataclass
class WeldingMap:
    """Decreasing homeomorphism of ``[a, b]`` sampled at ``samples[:, 0]``.

    ``samples`` has columns ``(x, h(x))`` sorted by ``x``; ``u`` is the fixed
    point (preimage of the slit tip).
    """

    a: float
    b: float
    samples: np.ndarray
    u: float
    max_residual: float
    residual_excluded_edge: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2:
            raise ValueError("samples must have shape (n, 2)")
        if np.any(np.diff(s[:, 1]) >= 0):
            raise ValueError("welding samples must be strictly decreasing")
        if not self.a < self.u < self.b:
            raise ValueError("fixed point must lie inside (a, b)")
        self.samples = s

    def __call__(self, x):
        return np.interp(x, self.samples[:, 0], self.samples[:, 1])

    def involution_defect(self):
        x = self.samples[:, 0]
        return np.abs(self(self(x)) - x)

    def to_dict(self):
        return {"a": self.a, "b": self.b, "u": self.u, "max_residual": self.max_residual,
                "samples": self.samples.tolist()}


@dataclass
class SlitVerdict:
    case: SlitCase
    C: float
    conditions: dict
    welding: Optional[WeldingMap] = None
    attempted: Optional[SlitCase] = None

    @property
    def accepted(self):
        return self.case is not SlitCase.REJECTED

    def failed_clauses(self):
        return [k for k, c in self.conditions.items() if not c.passed]

    def to_dict(self):
        return {
            "case": self.case.value,
            "attempted": None if self.attempted is None else self.attempted.value,
            "C": None if not np.isfinite(self.C) else self.C,
            "conditions": {k: c.to_dict() for k, c in self.conditions.items()},
            "welding": None if self.welding is None else {
                "u": self.welding.u, "max_residual": self.welding.max_residual,
                "a": self.welding.a, "b": self.welding.b},
        }


@dataclass
class SlitCurve:
    """Samples of ``gamma`` on ``[a, b]`` with the tip parameter ``u``."""

    x: np.ndarray
    gamma: np.ndarray
    u: float
    tip: complex
    C: float
    case: SlitCase

    def as_points(self):
        return np.column_stack([self.gamma.real, self.gamma.imag])


@dataclass
class AtomLocation:
    position: Optional[float]
    weight: float
    roots: tuple = ()


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Enum):
        return obj.value
    return obj


# --------------------------------------------------------------------------
# structure and sampling
# --------------------------------------------------------------------------

def _structure(mu: MeasureSpec):
    """Return ``(segment, atom_or_None)`` or raise on malformed support."""
    if len(mu.segments) > 1:
        raise SupportError(f"support must be one interval, got {len(mu.segments)} segments")
    if not mu.segments:
        return None, None
    if len(mu.atoms) > 1:
        raise SupportError(f"at most one atom is allowed, got {len(mu.atoms)}")
    seg = mu.segments[0]
    atom = None
    if len(mu.atoms):
        x0, lam = mu.atoms[0]
        if seg.a <= x0 <= seg.b:
            raise SupportError(f"atom at {x0:g} lies inside the density interval")
        atom = (float(x0), float(lam))
    return seg, atom


def _grid(a, b, n):
    # cosine spacing resolves square-root behaviour at both endpoints; the
    # geometric clusters catch curve pieces squeezed against them
    th = np.linspace(0.0, np.pi, n)
    x = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(th)
    x[0], x[-1] = a, b
    near = (b - a) * np.logspace(-12, np.log10(max(x[1] - a, 1e-300)), 25)[:-1]
    return np.unique(np.concatenate([x, a + near, b - near]))


def _tip_parameter(mu, seg, x, gamma):
    """Parameter of the slit tip, where the curve reverses direction.

    Near the tip ``gamma(x) ~ tip + c (x - u)^2``; the sharpest turn of the
    sampled curve brackets ``u`` and a complex quadratic fit on a local grid
    pins it down.
    """
    inner = np.flatnonzero(np.isfinite(gamma))
    # keep clear of the endpoint clusters, where squeezed pieces of the
    # curve produce spurious sharp turns
    pad = 1e-3 * (seg.b - seg.a)
    inner = inner[(inner > 0) & (inner < x.size - 1)
                  & (x[inner] > seg.a + pad) & (x[inner] < seg.b - pad)]
    chords = np.diff(gamma)
    with np.errstate(invalid="ignore"):
        turn = np.abs(np.angle(chords[1:] / chords[:-1]))
    turn = np.where(np.isfinite(turn), turn, 0.0)
    i = int(inner[np.argmax(turn[inner - 1])])
    lo, hi = x[i - 1], x[i + 1]
    for _ in range(3):
        xs = np.linspace(lo, hi, 9)
        g = _gamma(*_pair(mu, seg, xs))
        p2, p1, _ = np.polyfit(xs - xs[4], g, 2)
        u = float(np.clip(xs[4] - 0.5 * np.real(p1 / p2), lo, hi))
        w = 0.25 * (hi - lo)
        lo, hi = max(u - w, seg.a), min(u + w, seg.b)
    return u


def _pair(mu, seg, x, near=1e-6):
    return seg(x), hilbert_on_grid(mu, x, near=near)


def _gamma(d, H):
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1.0 / (np.pi * (H - 1j * d))


def _arclength(gamma):
    return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(gamma)))])


def _max_jump(values):
    values = np.asarray(values)
    if values.size < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(values))))


def _continuity(func, x, values, tol, candidates=5, halvings=30):
    """Continuity test that zooms into the largest grid jumps.

    A jump over a grid cell is followed by repeated halving, keeping the
    half with the larger jump. Across a discontinuity the jump persists;
    for a continuous function, even one with steep square-root features,
    it dies out. The test passes when every zoomed jump is at most
    ``tol`` times the largest value.
    """
    values = np.asarray(values)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    limit = tol * max(scale, 1e-12)
    grid_jump = _max_jump(values)
    ev = {"max_adjacent_jump": grid_jump, "scale": scale, "modulus": tol}
    if grid_jump <= limit:
        return True, ev
    jumps = np.abs(np.diff(values))
    idx = np.argsort(jumps)[::-1][:candidates]
    lo, hi = x[idx].astype(float), x[idx + 1].astype(float)
    flo, fhi = values[idx], values[idx + 1]
    for _ in range(halvings):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        left = np.abs(fm - flo) >= np.abs(fhi - fm)
        hi, fhi = np.where(left, mid, hi), np.where(left, fm, fhi)
        lo, flo = np.where(left, lo, mid), np.where(left, flo, fm)
    zoomed = np.abs(fhi - flo)
    worst = int(np.argmax(zoomed))
    ev.update({"zoomed_jump": float(zoomed[worst]), "zoom_location": float(0.5 * (lo + hi)[worst]),
               "zoom_width": float((hi - lo)[worst])})
    return bool(zoomed[worst] <= limit), ev


def _blowup(mu, seg, side, decades=6):
    """Monotone growth test for ``d`` and ``|H|`` approaching an endpoint."""
    length = seg.b - seg.a
    delta = length * 10.0 ** -np.arange(1, decades + 1)
    x = seg.a + delta if side == "a" else seg.b - delta
    d, H = _pair(mu, seg, x)
    out = {}
    for name, v in (("d", np.abs(d)), ("H", np.abs(H))):
        growing = bool(np.all(np.diff(v) > 0) and v[-1] >= 3.0 * max(v[0], 1e-300))
        out[name] = {"blows_up": growing, "values": v, "delta": delta}
    return out


# --------------------------------------------------------------------------
# welding
# --------------------------------------------------------------------------

def _golden_min(func, lo, hi, iters=60):
    """Vectorised golden-section minimisation on per-point brackets."""
    g = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - g * (hi - lo)
    d = lo + g * (hi - lo)
    fc, fd = func(c), func(d)
    for _ in range(iters):
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        c_new = hi - g * (hi - lo)
        d_new = lo + g * (hi - lo)
        c, d = c_new, d_new
        fc, fd = func(c), func(d)
    return 0.5 * (lo + hi)


def _weld(mu, seg, x, d, H, zero_c, refine=True):
    a, b = seg.a, seg.b
    gamma = _gamma(d, H)
    if zero_c:
        gamma[0] = gamma[-1] = 0.0
    s = _arclength(gamma)
    total = s[-1]
    if not np.isfinite(total) or total <= 0:
        raise NoWeldingError("slit curve has no length", location=float(a))
    # matching by arclength from the tip: the two sides of a slit trace the
    # same curve in opposite directions, so h(x) sits at the same distance
    # along the curve past the tip as x sits before it
    u = _tip_parameter(mu, seg, x, gamma)
    su = float(np.interp(u, x, s))
    # both sides of a slit have the same length
    balance = abs(2 * su - total) / total
    left = (x < u) & (x > a)
    xl = x[left]
    right = x >= u
    hl = np.interp(2 * su - s[left], s[right], x[right])
    if refine and xl.size:
        # polish every match by minimising the curve distance over a bracket
        # of neighbouring grid cells on the tip-to-b side
        xr = np.concatenate([[u], x[x > u]])
        k = np.clip(np.searchsorted(xr, hl), 0, xr.size - 1)
        lo = xr[np.clip(k - 3, 0, xr.size - 1)]
        hi = xr[np.clip(k + 3, 0, xr.size - 1)]
        tgt = gamma[left]

        # the edge pairs are left out of the residual, so the fixed rule is
        # accurate enough for the search and the per-point endpoint rule is skipped
        def dist(y):
            return np.abs(_gamma(*_pair(mu, seg, y, near=0.0)) - tgt)

        hl = _golden_min(dist, lo, hi)
    # assemble the full decreasing map from the strictly decreasing part of
    # the left half and its mirror
    prev = np.minimum.accumulate(np.concatenate([[b], hl]))[:-1]
    mono = (hl < prev) & (hl > u)
    xm, hm = xl[mono], hl[mono]
    xs = np.concatenate([[a], xm, [u], hm[::-1], [b]])
    hs = np.concatenate([[b], hm, [u], xm[::-1], [a]])

    # residual in the (d, H) pair on the left half
    dh, Hh = _pair(mu, seg, hl, near=0.0)
    res_d = np.abs(dh - d[left])
    res_H = np.abs(Hh - H[left])
    # near the endpoints the two sides squeeze the curve at different power
    # rates, so matched pairs are not resolvable in floating point there
    edge = EDGE_FRACTION * (b - a)
    use = (np.minimum(xl - a, b - xl) > edge) & (np.minimum(hl - a, b - hl) > edge)
    residual = res_d + res_H
    profile = {"x": xl, "hx": hl, "delta_d": dh - d[left], "delta_H": Hh - H[left],
               "used": use, "balance": balance, "side_lengths": (su, total - su)}
    return xs, hs, float(u), residual, use, edge, profile


def _sample(mu, grid_n):
    seg, atom = _structure(mu)
    if seg is None:
        raise SupportError("measure has no density interval")
    x = _grid(seg.a, seg.b, grid_n)
    d = seg(x)
    H = np.empty_like(x)
    interior = (x > seg.a) & (x < seg.b)
    H[interior] = hilbert_on_grid(mu, x[interior])
    if atom is not None:
        H[~interior] = hilbert_on_grid(mu, x[~interior])
    else:
        H[~interior] = np.nan
    return seg, atom, x, d, H


def _density_matching(mu, seg, x, d):
    """Pair ``x`` with the point across the density peak where ``d`` is equal.

    For a unimodal density this is the only decreasing map preserving ``d``
    alone, so comparing ``H_mu`` across it shows why ``(d, H_mu)`` cannot be
    preserved. Reported at ``x = a + 3/4 (b - a)`` and at the worst interior
    sample; ``None`` when ``d`` is not unimodal.
    """
    a, b = seg.a, seg.b
    inner = (x > a) & (x < b)
    xi, di = x[inner], d[inner]
    m = int(np.argmax(di))
    if m in (0, xi.size - 1):
        return None
    slack = 1e-9 * di[m]
    if np.any(np.diff(di[:m + 1]) < -slack) or np.any(np.diff(di[m:]) > slack):
        return None
    xl, dl = xi[:m + 1], np.maximum.accumulate(di[:m + 1])
    xr, dr = xi[m:], np.minimum.accumulate(di[m:])

    def across(y, dy):
        return np.where(y > xi[m], np.interp(dy, dl, xl), np.interp(dy, dr[::-1], xr[::-1]))

    edge = EDGE_FRACTION * (b - a)
    probe = xi[(xi > a + edge) & (xi < b - edge)]
    hp = across(probe, seg(probe))
    Hp, Hh = hilbert_on_grid(mu, probe), hilbert_on_grid(mu, hp)
    k = int(np.argmax(np.abs(Hh - Hp)))
    xq = a + 0.75 * (b - a)
    hq = float(across(np.array([xq]), seg(np.array([xq])))[0])
    dq, Hq = _pair(mu, seg, np.array([xq, hq]))
    return {"x": xq, "h_d(x)": hq, "d(x)": dq[0], "d(h_d(x))": dq[1], "H(x)": Hq[0],
            "H(h_d(x))": Hq[1], "antisymmetric": bool(abs(Hq[0] + Hq[1]) <= 1e-4 * abs(Hq[0])),
            "worst": {"x": probe[k], "h_d(x)": hp[k], "H(x)": Hp[k], "H(h_d(x))": Hh[k]}}


def extract_welding(mu: MeasureSpec, grid_n=DEFAULT_GRID_N, weld_tol=1e-2, max_grid_n=3201):
    """Find the decreasing self-map ``h`` of ``[a, b]`` preserving ``(d, H_mu)``.

    The two boundary arcs of the slit are swept from both endpoints at equal
    arclength of ``gamma`` (a two-pointer merge in curve space, where the
    pair ``(d, H_mu)`` is a bijective coordinate), then polished locally by
    minimising ``|gamma(y) - gamma(x)|``. The grid doubles while the residual
    keeps improving and exceeds `weld_tol`.

    Raises
    ------
    NoWeldingError
        The matched pairs disagree by more than `weld_tol`; ``location`` is the
        first mismatching sample and ``witness`` holds the mismatch profile.
    """
    seg, atom = _structure(mu)
    if seg is None:
        raise SupportError("measure has no density interval")
    zero_c = atom is None
    n = grid_n
    best = None
    while True:
        seg, atom, x, d, H = _sample(mu, n)
        xs, hs, u, residual, use, edge, profile = _weld(mu, seg, x, d, H, zero_c)
        worst = float(np.max(residual[use])) if np.any(use) else float("inf")
        if best is not None and worst > 0.7 * best[0]:
            break
        best = (worst, xs, hs, u, residual, use, edge, profile)
        if worst <= weld_tol or 2 * n - 1 > max_grid_n:
            break
        n = 2 * n - 1
    worst, xs, hs, u, residual, use, edge, profile = best
    if profile["balance"] > BALANCE_TOL or not np.isfinite(worst):
        left_len, right_len = profile["side_lengths"]
        witness = {"reason": "the curve is not traversed twice: its two sides differ in length",
                   "u": u, "length_a_to_u": left_len, "length_u_to_b": right_len,
                   "balance": profile["balance"], "max_residual": worst,
                   "density_matching": _density_matching(mu, seg, x, d)}
        raise NoWeldingError(
            f"no decreasing welding: curve lengths on the two sides of the tip are "
            f"{left_len:.6g} and {right_len:.6g}", location=u, witness=witness)
    if worst > weld_tol:
        bad = np.flatnonzero(use & (residual > weld_tol))
        i = int(bad[0])
        loc = float(profile["x"][i])
        witness = {
            "x": loc, "h(x)": float(profile["hx"][i]),
            "delta_d": float(profile["delta_d"][i]), "delta_H": float(profile["delta_H"][i]),
            "max_residual": worst, "profile": profile,
            "density_matching": _density_matching(mu, seg, x, d),
        }
        raise NoWeldingError(
            f"no decreasing welding preserves (d, H): residual {worst:.3g} > {weld_tol:g}, "
            f"first mismatch at x = {loc:.6g}", location=loc, witness=witness)
    return WeldingMap(seg.a, seg.b, np.column_stack([xs, hs]), u, worst, edge)


# --------------------------------------------------------------------------
# conditions
# --------------------------------------------------------------------------

def check_slit_conditions(mu: MeasureSpec, grid_n=DEFAULT_GRID_N, endpoint_tol=1e-2,
                          match_tol=1e-3, continuity_tol=0.05, weld_tol=1e-2):
    """Test the slit-measure conditions and classify the measure.

    With an atom the ``C != 0`` conditions are checked, without one the
    ``C = 0`` conditions. Every finite check carries its numeric evidence;
    failed clauses carry a witness.

    Raises
    ------
    SupportError
        More than one density segment, more than one atom, or an atom inside
        the density interval.
    """
    seg, atom = _structure(mu)
    conditions = {}
    if seg is None:
        conditions["a"] = Clause("a", False, {"segments": 0, "atoms": len(mu.atoms)},
                                 {"reason": "no density interval: support is atomic only",
                                  "atoms": mu.atoms})
        return SlitVerdict(SlitCase.REJECTED, float("nan"), conditions)
    zero_c = atom is None
    attempted = SlitCase.ZERO_C if zero_c else SlitCase.NONZERO_C
    seg, atom, x, d, H = _sample(mu, grid_n)
    a, b = seg.a, seg.b
    edge = EDGE_FRACTION * (b - a)
    inner = (x > a + edge) & (x < b - edge) if zero_c else (x > a) & (x < b)

    # clause (a): density shape
    dmax = float(np.max(d[inner]))
    positive = bool(np.all(d[1:-1] > 0))
    ok_cont, ev_cont = _continuity(seg, x[inner], d[inner], continuity_tol)
    ev = {"a": a, "b": b, "min_interior_density": float(np.min(d[1:-1])),
          "density_continuity": ev_cont}
    passed = positive and ok_cont
    wit = None
    if not positive:
        i = int(np.argmin(d[1:-1])) + 1
        wit = {"x": x[i], "d": d[i], "reason": "density not positive inside (a, b)"}
    elif not ok_cont:
        wit = {"reason": "density jump exceeds the declared modulus", **ev_cont}
    if not zero_c:
        ends = (float(d[0]), float(d[-1]))
        ev.update({"d(a)": ends[0], "d(b)": ends[1], "atom": atom})
        if max(ends) > endpoint_tol * dmax:
            passed = False
            wit = wit or {"reason": "density does not vanish at the endpoints",
                          "d(a)": ends[0], "d(b)": ends[1], "tolerance": endpoint_tol * dmax}
    conditions["a"] = Clause("a", passed, ev, wit)

    # clause (b): Hilbert transform
    ok_h, ev_h = _continuity(lambda t: hilbert_on_grid(mu, t), x[inner], H[inner],
                               continuity_tol)
    ev = {"hilbert_continuity": ev_h}
    wit = None if ok_h else {"reason": "H_mu jump exceeds the declared modulus", **ev_h}
    C = float("nan")
    if not zero_c:
        Ha, Hb = float(H[0]), float(H[-1])
        mean = 0.5 * (Ha + Hb)
        C = 1.0 / (np.pi * mean) if mean != 0 else float("inf")
        match = abs(Ha - Hb) <= match_tol * max(1.0, abs(mean))
        sign_ok = (atom[0] < a) == (C > 0)
        ev.update({"H(a)": Ha, "H(b)": Hb, "C": C, "x0": atom[0],
                   "x0_side_consistent": sign_ok})
        if not match:
            wit = wit or {"reason": "H_mu(a) != H_mu(b)", "H(a)": Ha, "H(b)": Hb}
        elif not sign_ok:
            wit = wit or {"reason": "atom on the wrong side for the sign of C", "C": C,
                          "x0": atom[0]}
        passed = ok_h and match and sign_ok
    else:
        C = 0.0
        ends = {side: _blowup(mu, seg, side) for side in ("a", "b")}
        per_end = {side: {k: v["blows_up"] for k, v in e.items()} for side, e in ends.items()}
        each = {side: pe["d"] or pe["H"] for side, pe in per_end.items()}
        both_d = per_end["a"]["d"] and per_end["b"]["d"]
        both_H = per_end["a"]["H"] and per_end["b"]["H"]
        mixed = all(each.values()) and not (both_d or both_H)
        ev.update({"blowup": {side: {k: {"blows_up": v["blows_up"], "values": v["values"]}
                                     for k, v in e.items()} for side, e in ends.items()},
                   "mixed": mixed})
        if not all(each.values()):
            side = "a" if not each["a"] else "b"
            wit = wit or {"reason": f"neither d nor |H_mu| blows up at endpoint {side}",
                          "endpoint": side,
                          "d_values": ends[side]["d"]["values"],
                          "H_values": ends[side]["H"]["values"],
                          "delta": ends[side]["d"]["delta"]}
        passed = ok_h and all(each.values())
    conditions["b"] = Clause("b", passed, ev, wit)

    # clause (c): welding
    welding = None
    try:
        welding = extract_welding(mu, grid_n, weld_tol)
        conditions["c"] = Clause("c", True, {"max_residual": welding.max_residual,
                                             "u": welding.u})
    except NoWeldingError as exc:
        w = dict(exc.witness)
        w.pop("profile", None)
        conditions["c"] = Clause("c", False, {"max_residual": exc.witness.get("max_residual")},
                                 {"reason": str(exc), **w})
    ok = all(c.passed for c in conditions.values())
    case = attempted if ok else SlitCase.REJECTED
    return SlitVerdict(case, C, conditions, welding if ok else welding, attempted)


# --------------------------------------------------------------------------
# curve reconstruction and atom location
# --------------------------------------------------------------------------

def _curve_values(mu, seg, x):
    d = seg(x)
    H = np.full(x.shape, np.nan)
    interior = (x > seg.a) & (x < seg.b)
    H[interior] = hilbert_on_grid(mu, x[interior])
    return d, H, interior


def reconstruct_slit(mu: MeasureSpec, grid_n=DEFAULT_GRID_N, x=None, max_step=None,
                     max_rounds=12):
    """Trace ``gamma(x) = 1 / (pi (H_mu(x) - i d(x)))`` on ``[a, b]``.

    Endpoints map to ``C = 1 / (pi H_mu(a))`` with an atom and to ``0``
    without. The tip parameter ``u`` is where the curve reverses direction.
    Without explicit `x`, cells are bisected until consecutive samples of
    the curve are at most `max_step` apart (default ``1e-3`` of the curve's
    extent), for at most `max_rounds` rounds.

    Raises
    ------
    SingularPointError
        ``H_mu - i d`` vanishes at an interior sample.
    """
    seg, atom = _structure(mu)
    if seg is None:
        raise SupportError("measure has no density interval")
    a, b = seg.a, seg.b
    adaptive = x is None
    x = _grid(a, b, grid_n) if adaptive else np.asarray(x, dtype=float)
    if np.any(x < a) or np.any(x > b):
        raise GeometryError("curve parameters must lie in [a, b]")
    if atom is not None:
        ends = hilbert_on_grid(mu, np.array([a, b]))
        C = float(1.0 / (np.pi * 0.5 * (ends[0] + ends[1])))
    else:
        C = 0.0

    def trace(x):
        d, H, interior = _curve_values(mu, seg, x)
        denom = H - 1j * d
        scale = np.nanmax(np.abs(denom[interior])) if np.any(interior) else 1.0
        sing = interior & (np.abs(denom) <= 1e-12 * scale)
        if np.any(sing):
            raise SingularPointError(f"H_mu - i d vanishes at x = {x[np.argmax(sing)]:.6g}")
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma = 1.0 / (np.pi * denom)
        gamma[~interior] = C
        return gamma

    gamma = trace(x)
    if adaptive:
        step = max_step or 1e-3 * float(np.max(np.abs(gamma - C)))
        for _ in range(max_rounds):
            wide = np.abs(np.diff(gamma)) > step
            if not np.any(wide):
                break
            mid = 0.5 * (x[:-1] + x[1:])[wide]
            x = np.concatenate([x, mid])
            gamma = np.concatenate([gamma, trace(mid)])
            order = np.argsort(x)
            x, gamma = x[order], gamma[order]
    u = _tip_parameter(mu, seg, x, gamma)
    if adaptive and not np.any(x == u):
        k = np.searchsorted(x, u)
        x = np.insert(x, k, u)
        gamma = np.insert(gamma, k, trace(np.array([u]))[0])
    tip = complex(np.interp(u, x, gamma.real) + 1j * np.interp(u, x, gamma.imag))
    return SlitCurve(x, gamma, u, tip, C, SlitCase.ZERO_C if atom is None else SlitCase.NONZERO_C)


def locate_atom(density, hilbert_density=None, c_sign=1, tol=1e-12):
    """Recover the atom of a ``C != 0`` slit measure from its density alone.

    ``lambda = 1 - int d``, and equality ``H_mu(a) = H_mu(b)`` with
    ``H_mu = H_d + lambda / (pi (x - x0))`` gives the quadratic

        (x0 - a)(x0 - b) = lambda (b - a) / (pi (H_d(b) - H_d(a))),

    whose root left of ``a`` is taken when ``C > 0`` and right of ``b``
    otherwise.

    Parameters
    ----------
    density : DensitySegment or MeasureSpec
        The density on ``[a, b]``; atoms of a MeasureSpec are ignored.
    hilbert_density : callable, optional
        ``H_d``; computed from `density` when omitted.
    c_sign : int
        Sign of ``C``.
    """
    if isinstance(density, MeasureSpec):
        if len(density.segments) != 1:
            raise SupportError("need exactly one density segment")
        seg = density.segments[0]
    elif isinstance(density, DensitySegment):
        seg = density
    else:
        raise TypeError("density must be a DensitySegment or MeasureSpec")
    a, b = seg.a, seg.b
    lam = 1.0 - seg.integrate()
    if lam <= tol:
        return AtomLocation(None, 0.0)
    if hilbert_density is None:
        dens = MeasureSpec(np.zeros((0, 2)), [seg])
        hilbert_density = lambda t: hilbert_on_grid(dens, t)  # noqa: E731
    Ha, Hb = (float(np.atleast_1d(hilbert_density(np.array([v])))[0]) for v in (a, b))
    if Ha == Hb:
        raise GeometryError("H_d(a) = H_d(b): the atom quadratic is degenerate")
    K = lam * (b - a) / (np.pi * (Hb - Ha))
    disc = 0.25 * (b - a) ** 2 + K
    if K <= 0 or disc < 0:
        raise GeometryError(f"no root outside [a, b]: right-hand side {K:.6g} is not positive")
    root = np.sqrt(disc)
    roots = (0.5 * (a + b) - root, 0.5 * (a + b) + root)
    x0 = roots[0] if c_sign > 0 else roots[1]
    return AtomLocation(float(x0), float(lam), roots)
