"""Command-line front end: parse inputs, dispatch, write JSON and CSV outputs.

Exit codes: 0 success, 2 input or parse error, 3 numeric non-convergence
(a ``<command>.diagnostic.json`` is written), 4 negative verdict of a check
command. File formats are documented in ``docs/formats.md``.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import measures as M
from .cauchy import DEFAULT_EPS, cauchy_transform, f_transform, stieltjes_invert
from .characterize import check_slit_conditions, extract_welding
from .errors import (ExtrapolationError, HorizonError, NoWeldingError, ProximityError,
                     QuadratureError, RefinementError, SingularPointError)
from .hilbert import hilbert_on_grid
from .loewner import (DrivingFunction, DrivingMode, HerglotzFieldSpec, Interpolation,
                      chain_initial)
from .measures import DensitySegment, LevyTriple, MeasureSpec
from .monotone import monotone_convolve
from .zipper import SlitPolyline, decode_driving, encode_slit

OUT_ENV = "SLITMAPS_OUT"
CSV_COLUMNS = ("param", "re", "im", "err_est")
COMMANDS = ("encode", "decode", "chain", "transform", "invert", "check-slit", "weld",
            "convolve", "fourier", "levy")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_NEGATIVE = 0, 2, 3, 4
NUMERIC_ERRORS = (QuadratureError, RefinementError, HorizonError, ExtrapolationError,
                  SingularPointError)


class InputError(Exception):
    """Malformed or missing input; exit status 2."""


class NegativeVerdict(Exception):
    """A check ran to completion and said no; exit status 4."""

    def __init__(self, payload):
        super().__init__("negative verdict")
        self.payload = payload


@dataclass
class JobSpec:
    command: str
    inputs: list
    out_dir: Path
    tol: float = 1e-6
    grid_n: int = 801
    eps_schedule: tuple = DEFAULT_EPS
    horizon: float = 8.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.grid_n < 3:
            raise InputError("--grid-n must be at least 3")
        eps = np.asarray(self.eps_schedule, dtype=float)
        if eps.size == 0 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
            raise InputError("--eps-schedule must be strictly decreasing positive heights")
        if not self.horizon > 0:
            raise InputError("--horizon must be positive")
        for p in self.inputs:
            if not Path(p).is_file():
                raise InputError(f"input file not found: {p}")


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------

def to_jsonable(obj):
    """Plain JSON types; complex numbers become ``[re, im]``, non-finite floats ``null``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Enum):
        return obj.value
    return obj


def write_json(path: Path, payload):
    path.write_text(json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, param, values, err=None):
    """Rows ``param, re, im, err_est``; a missing error estimate is left empty."""
    values = np.asarray(values, dtype=complex)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i, (p, v) in enumerate(zip(np.asarray(param, dtype=float), values)):
            e = "" if err is None else repr(float(np.asarray(err)[i]))
            w.writerow([repr(float(p)), repr(float(v.real)), repr(float(v.imag)), e])


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from exc


def measure_from_json(doc) -> MeasureSpec:
    """``{"atoms": [[x, w], ...], "segments": [{"a", "b", "samples" | "formula"}]}``."""
    if not isinstance(doc, dict):
        raise InputError("a measure must be a JSON object")
    try:
        atoms = np.asarray(doc.get("atoms", []), dtype=float).reshape(-1, 2)
        segments = []
        for s in doc.get("segments", []):
            a, b = float(s["a"]), float(s["b"])
            if "formula" in s:
                name = s["formula"]
                if name not in M.FORMULAS:
                    raise InputError(f"unknown formula id {name!r}")
                params = dict(s.get("params", {}))
                weight = float(s.get("weight", 1.0))
                segments.append(DensitySegment(a, b, func=M._formula_func(name, a, b, params,
                                                                        weight),
                                               formula=name, params=params, scale=weight))
            elif "samples" in s:
                segments.append(DensitySegment(a, b, samples=np.asarray(s["samples"], float),
                                               interp=s.get("interp", "cubic")))
            else:
                raise InputError("a segment needs 'samples' or 'formula'")
        return MeasureSpec(atoms, segments, label=doc.get("label"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed measure: {exc}") from exc


def measure_to_json(mu: MeasureSpec, n_samples=1025):
    """Inverse of :func:`measure_from_json`; densities are written as samples."""
    segs = []
    for s in mu.segments:
        if s.formula is not None:
            segs.append({"a": s.a, "b": s.b, "formula": s.formula, "params": s.params,
                         "weight": s.scale})
        else:
            x = np.linspace(s.a, s.b, n_samples)
            segs.append({"a": s.a, "b": s.b, "samples": s(x)})
    return {"atoms": mu.atoms, "segments": segs, "label": mu.label}


def slit_from_json(doc) -> SlitPolyline:
    """``[[re, im], ...]`` or ``{"vertices": [[re, im], ...]}``."""
    verts = doc.get("vertices") if isinstance(doc, dict) else doc
    try:
        v = np.asarray(verts, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be [re, im] pairs")
        return SlitPolyline(v[:, 0] + 1j * v[:, 1])
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed slit: {exc}") from exc


def driving_from_csv(path, mode) -> DrivingFunction:
    """Header ``t,value`` (chordal) or ``t,angle`` (radial)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header = [h.strip() for h in rows[0]]
        data = np.asarray(rows[1:], dtype=float)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError("expected two columns")
        t, v = data[:, 0], data[:, 1]
        if header == ["t", "angle"]:
            return DrivingFunction.from_angles(t, v, Interpolation(_interp(mode)))
        if header == ["t", "value"]:
            return DrivingFunction(t, v, DrivingMode.CHORDAL, Interpolation.CONSTANT)
        raise ValueError(f"unknown header {header}")
    except (OSError, IndexError, ValueError) as exc:
        raise InputError(f"cannot parse driving function {path}: {exc}") from exc


def _interp(mode):
    return Interpolation.CONSTANT if mode == "piecewise" else Interpolation.LINEAR


def levy_from_json(doc) -> LevyTriple:
    """``{"a": drift, "sigma": gaussian, "nu": measure}``."""
    try:
        nu = measure_from_json(doc.get("nu", {}))
        return LevyTriple(float(doc["a"]), float(doc["sigma"]), nu)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed Levy triple: {exc}") from exc


def _points(text):
    # "re,im;re,im;..." or a JSON file of [re, im] pairs
    if text is None:
        return None
    if Path(text).is_file():
        arr = np.asarray(_read_json(text), dtype=float).reshape(-1, 2)
    else:
        try:
            arr = np.array([[float(v) for v in p.split(",")] for p in text.split(";") if p],
                           dtype=float).reshape(-1, 2)
        except ValueError as exc:
            raise InputError(f"cannot parse points {text!r}") from exc
    return arr[:, 0] + 1j * arr[:, 1]


def default_disc_points(n=50, radius=0.5):
    """Deterministic sample of `n` points in ``|z| <= radius``."""
    k = np.arange(n)
    r = radius * np.sqrt((k + 0.5) / n)
    theta = k * np.pi * (3.0 - np.sqrt(5.0))
    return r * np.exp(1j * theta)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _cmd_encode(job):
    slit = slit_from_json(_read_json(job.inputs[0]))
    kappa, cap = encode_slit(slit)
    with (job.out_dir / "encode.driving.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(cap.times, kappa.values):
            w.writerow([repr(float(t)), repr(float(v))])
    return {"total_c": cap.total_c, "n_steps": int(cap.increments.size),
            "driving_file": "encode.driving.csv"}, None


def _cmd_decode(job):
    kappa = driving_from_csv(job.inputs[0], "piecewise")
    if kappa.mode is not DrivingMode.CHORDAL:
        raise InputError("decode needs a chordal driving function (header t,value)")
    trace = decode_driving(kappa)
    v = trace.vertices
    return ({"tip": v[-1], "simple": trace.self_intersection is None, "n_points": v.size},
            (np.arange(v.size), v, None))


def _cmd_chain(job):
    kappa = driving_from_csv(job.inputs[0], job.extra.get("interp", "linear"))
    if kappa.mode is not DrivingMode.RADIAL:
        raise InputError("chain needs a radial driving function (header t,angle)")
    z = _points(job.extra.get("points"))
    z = default_disc_points() if z is None else z
    res = chain_initial(HerglotzFieldSpec.single(kappa), float(job.extra.get("s", 0.0)), z,
                        horizon=job.horizon, tol=job.tol)
    return ({"horizon": res.horizon, "history": res.history, "points": z},
            (np.arange(z.size), res.values, res.error))


def _line(mu, job):
    lo, hi = mu.support_bounds()
    pad = 0.1 * (hi - lo) + 0.1
    return np.linspace(lo - pad, hi + pad, job.grid_n)


def _cmd_transform(job):
    mu = measure_from_json(_read_json(job.inputs[0]))
    kind = job.extra.get("kind", "G")
    x = _line(mu, job)
    if kind == "hilbert":
        vals = hilbert_on_grid(mu, x)
        return {"kind": kind}, (x, vals, None)
    y = float(job.extra.get("height", 0.1))
    z = x + 1j * y
    vals = cauchy_transform(mu, z) if kind == "G" else f_transform(mu, z)
    return {"kind": kind, "height": y}, (x, vals, None)


def _cmd_invert(job):
    mu = measure_from_json(_read_json(job.inputs[0]))
    x = _line(mu, job)
    inv = stieltjes_invert(mu, x, job.eps_schedule)
    atoms = [{"position": a.position, "weight": a.weight, "err_est": a.error} for a in inv.atoms]
    return ({"atoms": atoms, "converged_fraction": float(np.mean(inv.converged)),
             "eps_schedule": inv.eps},
            (x, inv.density, inv.density_error))


def _cmd_check_slit(job):
    mu = measure_from_json(_read_json(job.inputs[0]))
    verdict = check_slit_conditions(mu, grid_n=job.grid_n)
    payload = verdict.to_dict()
    if not verdict.accepted:
        raise NegativeVerdict(payload)
    return payload, None


def _cmd_weld(job):
    mu = measure_from_json(_read_json(job.inputs[0]))
    try:
        weld = extract_welding(mu, grid_n=job.grid_n)
    except NoWeldingError as exc:
        w = dict(exc.witness or {})
        w.pop("profile", None)
        raise NegativeVerdict({"welding": None, "reason": str(exc), "witness": w}) from exc
    s = weld.samples
    return ({"a": weld.a, "b": weld.b, "u": weld.u, "max_residual": weld.max_residual},
            (s[:, 0], s[:, 1], None))


def _cmd_convolve(job):
    if len(job.inputs) != 2:
        raise InputError("convolve needs two measure files")
    mu, nu = (measure_from_json(_read_json(p)) for p in job.inputs)
    res = monotone_convolve(mu, nu, grid_n=job.grid_n, eps_schedule=job.eps_schedule)
    return ({"measure": measure_to_json(res.measure), "residual": res.residual,
             "mass": res.mass, "retreats": res.retreats}, None)


def _fourier_grid(job):
    return np.linspace(float(job.extra.get("x_min", -10.0)), float(job.extra.get("x_max", 10.0)),
                       job.grid_n)


def _cmd_fourier(job):
    mu = measure_from_json(_read_json(job.inputs[0]))
    x = _fourier_grid(job)
    return {"mass": mu.total_mass()}, (x, M.fourier_transform(mu, x), None)


def _cmd_levy(job):
    triple = levy_from_json(_read_json(job.inputs[0]))
    x = _fourier_grid(job)
    vals = M.levy_khintchine(triple, x)
    normed, shift = M.normalize_levy(triple)
    flag, why = M.unique_embedding(normed)
    return {"unique_embedding": flag, "reason": why, "shift": shift}, (x, vals, None)


HANDLERS = {
    "encode": _cmd_encode, "decode": _cmd_decode, "chain": _cmd_chain,
    "transform": _cmd_transform, "invert": _cmd_invert, "check-slit": _cmd_check_slit,
    "weld": _cmd_weld, "convolve": _cmd_convolve, "fourier": _cmd_fourier, "levy": _cmd_levy,
}


def run(job: JobSpec) -> int:
    """Execute one job; returns the exit status and writes its output files."""
    job.out_dir.mkdir(parents=True, exist_ok=True)
    stem = job.command.replace("-", "_")
    try:
        payload, curve = HANDLERS[job.command](job)
    except NegativeVerdict as neg:
        write_json(job.out_dir / f"{stem}.json", {"command": job.command, "status": "negative",
                                                  **neg.payload})
        return EXIT_NEGATIVE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NUMERIC_ERRORS as exc:
        write_json(job.out_dir / f"{stem}.diagnostic.json",
                   {"command": job.command, "error": type(exc).__name__, "message": str(exc)})
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, ProximityError) as exc:
        # validation inside the library (bad geometry, non-probability input, ...)
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    write_json(job.out_dir / f"{stem}.json", {"command": job.command, "status": "ok", **payload})
    if curve is not None:
        write_csv(job.out_dir / f"{stem}.csv", *curve)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="slitmaps", description=__doc__.splitlines()[0])
    parser.add_argument("--tol", type=float, default=1e-6)
    parser.add_argument("--grid-n", type=int, default=801)
    parser.add_argument("--eps-schedule", type=str, default=",".join(map(str, DEFAULT_EPS)),
                        help="comma-separated decreasing heights")
    parser.add_argument("--horizon", type=float, default=8.0)
    parser.add_argument("--out", type=str, default=None,
                        help=f"output directory (default ${OUT_ENV} or the current directory)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("inputs", nargs="+" if name == "convolve" else 1)
        if name == "transform":
            p.add_argument("--kind", choices=("G", "F", "hilbert"), default="G")
            p.add_argument("--height", type=float, default=0.1)
        if name == "chain":
            p.add_argument("--points", default=None,
                           help="'re,im;re,im;...' or a JSON file of [re, im] pairs")
            p.add_argument("--s", type=float, default=0.0)
            p.add_argument("--interp", choices=("linear", "piecewise"), default="linear")
        if name in ("fourier", "levy"):
            p.add_argument("--x-min", type=float, default=-10.0)
            p.add_argument("--x-max", type=float, default=10.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    out = args.out or os.environ.get(OUT_ENV) or "."
    extra = {k: v for k, v in vars(args).items()
             if k not in ("tol", "grid_n", "eps_schedule", "horizon", "out", "command", "inputs")}
    try:
        eps = tuple(float(v) for v in args.eps_schedule.split(","))
        job = JobSpec(args.command, list(args.inputs), Path(out), args.tol, args.grid_n, eps,
                      args.horizon, extra)
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
