"""Configuration, result files, run state persistence and the command line.

A run is described by a flat JSON object::

    {"alpha": 0.5, "beta": 0.25, "p": 2.0, "dim": 1,
     "L": 64.0, "n": 256, "dt": 0.02, "T_max": 200.0,
     "q_list": [1, 2, "inf"],
     "datum": {"kind": "gaussian", "amplitude": 0.5, "width": 1.0},
     "blowup_cap_factor": 1e6, "nonlinearity": "power"}

Optional keys are ``boundary_tol``, ``refine_detection`` and
``snapshot_every``. Every problem in a file is reported at once, each with
the path of the offending field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .criteria import (
    GaussianDatum, IndicatorDatum, blowup_certificate, calibration_hash,
    calibration_key, classify_q, exponents, load_calibration, sup_mass)
from .kernels import FractionalParams
from .spectral_solver import (
    BOUNDARY_TOL, Field, Grid, SimulationOutcome, SpectralHistory, solve)

logger = logging.getLogger(__name__)

__all__ = [
    "ConfigError",
    "FileDatum",
    "SimulationConfig",
    "parse_config",
    "config_from_dict",
    "config_to_dict",
    "compute_criteria",
    "emit_results",
    "save_state",
    "load_state",
    "main",
    "MAX_STEPS",
]

#: Largest number of time steps a configuration may request.
MAX_STEPS = 20000

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; ``violations`` lists ``(field_path, message)``."""

    def __init__(self, violations) -> None:
        self.violations = list(violations)
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in self.violations))


# {{{ configuration


@dataclass(frozen=True)
class FileDatum:
    """Datum read from a file (``.npy``, or raw little-endian float64)."""

    path: str
    amplitude: float = 1.0

    def values(self, grid: Grid) -> np.ndarray:
        path = Path(self.path)
        if path.suffix == ".npy":
            data = np.load(path)
        else:
            data = np.fromfile(path, dtype="<f8")
        if data.size != math.prod(grid.shape):
            raise ValueError(f"{path}: {data.size} values, grid needs "
                             f"{math.prod(grid.shape)}")
        return self.amplitude * data.reshape(grid.shape).astype(float)

    def field(self, grid: Grid) -> Field:
        return Field(grid, self.values(grid))

    def scaled(self, factor: float) -> "FileDatum":
        return FileDatum(self.path, self.amplitude * factor)


@dataclass(frozen=True)
class SimulationConfig:
    """Validated description of one run."""

    params: FractionalParams
    grid: Grid
    dt: float
    T_max: float
    q_list: tuple
    datum: object
    blowup_cap_factor: float = 1.0e6
    nonlinearity: str = "power"
    boundary_tol: float = BOUNDARY_TOL
    refine_detection: bool = True
    snapshot_every: int = 0

    def initial_field(self) -> Field:
        return self.datum.field(self.grid)

    def with_datum(self, datum) -> "SimulationConfig":
        return replace(self, datum=datum)

    def with_params(self, **changes) -> "SimulationConfig":
        return replace(self, params=replace(self.params, **changes))


_KNOWN_KEYS = {"alpha", "beta", "p", "dim", "L", "n", "dt", "T_max", "q_list", "datum",
               "blowup_cap_factor", "nonlinearity", "boundary_tol", "refine_detection",
               "snapshot_every"}
_PATHS = {"alpha": "params.alpha", "beta": "params.beta", "p": "params.p",
          "dim": "params.dim", "L": "grid.L", "n": "grid.n"}
_NONLINEARITIES = ("power", "lipschitz_demo", "zero")


def _number(raw, key, errors, *, integer=False):
    value = raw.get(key)
    path = _PATHS.get(key, key)
    if value is None:
        errors.append((path, "required"))
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append((path, f"must be a number: got {value!r}"))
        return None
    if integer and not float(value).is_integer():
        errors.append((path, f"must be an integer: got {value!r}"))
        return None
    if not math.isfinite(value):
        errors.append((path, f"must be finite: got {value!r}"))
        return None
    return int(value) if integer else float(value)


def _q_value(q):
    if isinstance(q, str) and q.strip().lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(q, bool) or not isinstance(q, (int, float)):
        raise TypeError
    return float(q)


def _parse_datum(raw, base_dir, errors):
    if not isinstance(raw, dict):
        errors.append(("datum", "must be an object"))
        return None
    kind = raw.get("kind")
    amplitude = _number(raw, "amplitude", sub := [])
    errors.extend((f"datum.{p}", m) for p, m in sub)
    unknown = set(raw) - {"kind", "amplitude", "width", "radius", "path"}
    for key in sorted(unknown):
        errors.append((f"datum.{key}", "unknown field"))
    if kind == "gaussian":
        width = raw.get("width", 1.0)
        if isinstance(width, bool) or not isinstance(width, (int, float)) or not width > 0:
            errors.append(("datum.width", f"must be positive: got {width!r}"))
            return None
        return None if amplitude is None else GaussianDatum(amplitude, float(width))
    if kind == "indicator":
        radius = raw.get("radius", 1.0)
        if isinstance(radius, bool) or not isinstance(radius, (int, float)) or not radius > 0:
            errors.append(("datum.radius", f"must be positive: got {radius!r}"))
            return None
        return None if amplitude is None else IndicatorDatum(amplitude, float(radius))
    if kind == "file":
        path = raw.get("path")
        if not isinstance(path, str):
            errors.append(("datum.path", "required for kind 'file'"))
            return None
        full = Path(base_dir, path) if base_dir is not None else Path(path)
        if not full.is_file():
            errors.append(("datum.path", f"no such file: {full}"))
            return None
        return None if amplitude is None else FileDatum(str(full), amplitude)
    errors.append(("datum.kind", f"must be gaussian, indicator or file: got {kind!r}"))
    return None


def config_from_dict(raw: dict, base_dir=None) -> SimulationConfig:
    """Validate *raw* and build a :class:`SimulationConfig`.

    Raises
    ------
    ConfigError
        Listing every violation found.
    """
    if not isinstance(raw, dict):
        raise ConfigError([("", "configuration must be a JSON object")])
    errors: list = []
    for key in sorted(set(raw) - _KNOWN_KEYS):
        errors.append((key, "unknown field"))

    alpha = _number(raw, "alpha", errors)
    beta = _number(raw, "beta", errors)
    p = _number(raw, "p", errors)
    dim = _number(raw, "dim", errors, integer=True)
    if alpha is not None and not 0.0 < alpha <= 1.0:
        errors.append(("params.alpha", f"must be in (0, 1]: got {alpha}"))
    if beta is not None and not 0.0 < beta <= 1.0:
        errors.append(("params.beta", f"must be in (0, 1]: got {beta}"))
    if p is not None and not p >= 1.0:
        errors.append(("params.p", f"must be >= 1: got {p}"))
    if dim is not None and dim not in (1, 2, 3):
        errors.append(("params.dim", f"must be 1, 2 or 3: got {dim}"))

    L = _number(raw, "L", errors)
    n = _number(raw, "n", errors, integer=True)
    if L is not None and not L > 0:
        errors.append(("grid.L", f"must be positive: got {L}"))
    if n is not None and (n < 32 or n & (n - 1)):
        errors.append(("grid.n", f"must be a power of two >= 32: got {n}"))

    dt = _number(raw, "dt", errors)
    T_max = _number(raw, "T_max", errors)
    if dt is not None and not dt > 0:
        errors.append(("dt", f"must be positive: got {dt}"))
    if T_max is not None and not T_max > 0:
        errors.append(("T_max", f"must be positive: got {T_max}"))
    if dt is not None and T_max is not None and dt > 0 and T_max > 0:
        nsteps = round(T_max / dt)
        if abs(nsteps * dt - T_max) > 1.0e-9 * T_max:
            errors.append(("T_max", f"must be a multiple of dt={dt}: got {T_max}"))
        elif nsteps > MAX_STEPS:
            errors.append(("T_max", f"T_max/dt = {nsteps} steps exceeds {MAX_STEPS}"))

    q_raw = raw.get("q_list", [1, 2, "inf"])
    q_list = []
    if not isinstance(q_raw, list) or not q_raw:
        errors.append(("q_list", "must be a nonempty list"))
    else:
        for i, q in enumerate(q_raw):
            try:
                value = _q_value(q)
            except TypeError:
                errors.append((f"q_list[{i}]", f"must be a number or 'inf': got {q!r}"))
                continue
            if not value >= 1.0:
                errors.append((f"q_list[{i}]", f"requires q >= 1: got {q!r}"))
            else:
                q_list.append(value)

    datum = _parse_datum(raw.get("datum"), base_dir, errors) if "datum" in raw else None
    if "datum" not in raw:
        errors.append(("datum", "required"))

    cap = raw.get("blowup_cap_factor", 1.0e6)
    if isinstance(cap, bool) or not isinstance(cap, (int, float)) or not cap > 1:
        errors.append(("blowup_cap_factor", f"must be a number > 1: got {cap!r}"))
    nonlinearity = raw.get("nonlinearity", "power")
    if nonlinearity not in _NONLINEARITIES:
        errors.append(("nonlinearity", f"must be one of {', '.join(_NONLINEARITIES)}: "
                                       f"got {nonlinearity!r}"))
    boundary_tol = raw.get("boundary_tol", BOUNDARY_TOL)
    if (isinstance(boundary_tol, bool) or not isinstance(boundary_tol, (int, float))
            or not boundary_tol > 0):
        errors.append(("boundary_tol", f"must be positive: got {boundary_tol!r}"))
    refine = raw.get("refine_detection", True)
    if not isinstance(refine, bool):
        errors.append(("refine_detection", f"must be true or false: got {refine!r}"))
    snapshot_every = raw.get("snapshot_every", 0)
    if isinstance(snapshot_every, bool) or not isinstance(snapshot_every, int) \
            or snapshot_every < 0:
        errors.append(("snapshot_every", f"must be a nonnegative integer: "
                                         f"got {snapshot_every!r}"))

    if errors:
        raise ConfigError(errors)
    return SimulationConfig(
        params=FractionalParams(alpha, beta, p, dim),
        grid=Grid(dim, L, n),
        dt=dt, T_max=T_max, q_list=tuple(q_list), datum=datum,
        blowup_cap_factor=float(cap), nonlinearity=nonlinearity,
        boundary_tol=float(boundary_tol), refine_detection=refine,
        snapshot_every=snapshot_every)


def parse_config(path) -> SimulationConfig:
    """Read and validate a JSON configuration file.

    Raises
    ------
    OSError
        If the file cannot be read.
    ConfigError
        For malformed JSON or invalid contents.
    """
    path = Path(path)
    text = path.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([("", f"{path}: invalid JSON: {exc}")]) from exc
    return config_from_dict(raw, base_dir=path.parent)


def _q_json(q: float):
    return "inf" if math.isinf(q) else q


def config_to_dict(config: SimulationConfig) -> dict:
    """Inverse of :func:`config_from_dict`."""
    d = config.datum
    if isinstance(d, GaussianDatum):
        datum = {"kind": "gaussian", "amplitude": d.amplitude, "width": d.width}
    elif isinstance(d, IndicatorDatum):
        datum = {"kind": "indicator", "amplitude": d.amplitude, "radius": d.radius}
    else:
        datum = {"kind": "file", "amplitude": d.amplitude, "path": d.path}
    prm = config.params
    return {
        "alpha": prm.alpha, "beta": prm.beta, "p": prm.p, "dim": prm.dim,
        "L": config.grid.half_width, "n": config.grid.n,
        "dt": config.dt, "T_max": config.T_max,
        "q_list": [_q_json(q) for q in config.q_list],
        "datum": datum,
        "blowup_cap_factor": config.blowup_cap_factor,
        "nonlinearity": config.nonlinearity,
        "boundary_tol": config.boundary_tol,
        "refine_detection": config.refine_detection,
        "snapshot_every": config.snapshot_every,
    }

# }}}


# {{{ criteria report


def compute_criteria(config: SimulationConfig, R0: float = 1.0e-2,
                     R_max: float | None = None, calibration: dict | None = None) -> dict:
    """Exponents, range classes, weighted mass and blow-up certificate.

    Closed-form data are integrated exactly, file data on the grid. The
    certificate uses the calibrated threshold for these parameters when
    the calibration file has one.
    """
    params = config.params
    datum = config.datum
    u0 = config.initial_field() if isinstance(datum, FileDatum) else datum
    expo = exponents(params)
    out = {
        "exponents": expo.as_dict(),
        "range_class": {str(_q_json(q)): {"tag": (rc := classify_q(q, params)).tag,
                                           "witnesses": rc.witnesses}
                        for q in config.q_list},
        "b_decay": {str(_q_json(q)): expo.b_decay(q) for q in config.q_list},
    }
    if params.p > 1.0:
        report = sup_mass(u0, R0, R_max, params)
        out["mass_report"] = report.as_dict()
        if calibration is None:
            calibration = load_calibration()
        entry = calibration.get("entries", {}).get(calibration_key(params))
        if entry is not None:
            cert = blowup_certificate(u0, entry["C"], params, R_max=report.radii[-1])
            out["certificate"] = cert.as_dict()
        else:
            out["certificate"] = None
    else:
        out["mass_report"] = None
        out["certificate"] = None
    return out

# }}}


# {{{ result files


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as outf:
            outf.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_bytes(obj) -> bytes:
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(f"not JSON serialisable: {type(o).__name__}")

    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return str(o)
        if isinstance(o, dict):
            return {str(k): clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, np.generic):
            return clean(o.item())
        return o

    return (json.dumps(clean(obj), indent=1, sort_keys=True, default=default)
            + "\n").encode()


def _norms_csv(outcome: SimulationOutcome) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "q", "norm"])
    for q in sorted(outcome.norm_traces):
        for t, value in zip(outcome.times, outcome.norm_traces[q]):
            writer.writerow([repr(float(t)), _q_json(q), repr(float(value))])
    return buf.getvalue().encode()


def outcome_dict(outcome: SimulationOutcome) -> dict:
    """Deterministic summary of *outcome* (wall time excluded)."""
    return {"status": outcome.status, "t_detect": outcome.t_detect,
            "reason": outcome.reason, "steps": outcome.steps,
            "diagnostics": dict(outcome.diagnostics)}


def emit_results(outcome: SimulationOutcome, criteria: dict | None, outdir) -> list:
    """Write ``norms.csv``, ``outcome.json``, ``criteria.json`` and snapshots.

    Every file is written to a temporary name and renamed into place. The
    wall time is not written, so identical inputs give identical bytes.

    Returns
    -------
    list of pathlib.Path
        The files written.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = {
        "norms.csv": _norms_csv(outcome),
        "outcome.json": _json_bytes(outcome_dict(outcome)),
        "criteria.json": _json_bytes(criteria if criteria is not None else {}),
    }
    state = outcome.state
    if state is not None and state.snapshots:
        times = [t for t, _ in state.snapshots]
        stack = np.stack([u for _, u in state.snapshots]).astype("<f8")
        files["snapshots.f64"] = stack.tobytes(order="C")
        files["snapshots.json"] = _json_bytes({
            "shape": list(stack.shape), "dtype": "float64", "endianness": "little",
            "order": "row-major", "times": times,
            "grid": {"dim": state.grid.dim, "L": state.grid.half_width,
                     "n": state.grid.n}})
    written = []
    for name, data in files.items():
        path = outdir / name
        _atomic_write(path, data)
        written.append(path)
    return written

# }}}


# {{{ run state


def save_state(state: SpectralHistory, path) -> None:
    """Store everything :func:`~fracfujita.spectral_solver.continue_run` needs."""
    steps = state.steps
    meta = {
        "params": [state.params.alpha, state.params.beta, state.params.p, state.params.dim],
        "grid": [state.grid.dim, state.grid.half_width, state.grid.n],
        "dt": state.dt, "nonlinearity": state.nonlinearity, "cap": state.cap,
        "q_list": [_q_json(q) for q in state.q_list], "mode_order": state.mode_order,
        "steps": steps, "shell_ratio_max": state.shell_ratio_max,
        "blown_up": state.blown_up, "snapshot_every": state.snapshot_every,
        "snapshot_times": [t for t, _ in state.snapshots],
    }
    arrays = {
        "meta": np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
        "u0": state.u0, "current": state.current, "current_hat": state.current_hat,
        "f_hist": state.f_hist[:, :steps + 1],
        "pending": state.pending[:, :2 * steps + 2],
        "trace_times": np.array(state.trace_times),
        "traces": np.array([state.traces[q] for q in state.q_list]),
        "snapshots": (np.stack([u for _, u in state.snapshots]) if state.snapshots
                      else np.zeros((0,) + state.grid.shape)),
    }
    path = Path(path)
    buf = io.BytesIO()
    np.savez(buf, **arrays)
    _atomic_write(path, buf.getvalue())


def load_state(path) -> SpectralHistory:
    """Inverse of :func:`save_state`."""
    with np.load(path) as data:
        meta = json.loads(data["meta"].tobytes().decode())
        q_list = tuple(_q_value(q) for q in meta["q_list"])
        state = SpectralHistory(
            params=FractionalParams(*meta["params"]),
            grid=Grid(*meta["grid"]),
            dt=meta["dt"], nonlinearity=meta["nonlinearity"], u0=data["u0"],
            cap=meta["cap"], q_list=q_list, mode_order=meta["mode_order"],
            steps=meta["steps"], current=data["current"],
            current_hat=data["current_hat"], f_hist=data["f_hist"],
            pending=data["pending"], trace_times=list(data["trace_times"]),
            traces={q: list(row) for q, row in zip(q_list, data["traces"])},
            shell_ratio_max=meta["shell_ratio_max"], blown_up=meta["blown_up"],
            snapshot_every=meta["snapshot_every"],
            snapshots=list(zip(meta["snapshot_times"], data["snapshots"])))
    return state

# }}}


# {{{ command line


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _range_arg(text: str, geometric: bool) -> list:
    """``lo:hi:count`` (or a comma list) to a list of floats."""
    if ":" in text:
        lo, hi, count = text.split(":")
        space = np.geomspace if geometric else np.linspace
        return [float(v) for v in space(float(lo), float(hi), int(count))]
    return [float(v) for v in text.split(",")]


def _cmd_ml_eval(args) -> int:
    from .special_functions import ml_eval, MLParams

    rows = []
    if args.grid is not None:
        with open(args.grid, newline="") as inf:
            reader = csv.reader(inf)
            for row in reader:
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    values = [float(v) for v in row]
                except ValueError:
                    continue    # header
                if len(values) == 3:
                    rows.append(tuple(values))
                elif len(values) == 1 and args.a is not None and args.b is not None:
                    rows.append((args.a, args.b, values[0]))
                else:
                    raise ValueError(f"grid rows must be 'a,b,z' or 'z': got {row}")
    else:
        if args.a is None or args.b is None or args.z is None:
            raise _UsageError("ml-eval needs --a, --b and --z, or --grid")
        rows.append((args.a, args.b, args.z))

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["a", "b", "z", "value"])
    for a, b, z in rows:
        value = ml_eval(MLParams(a, b), z)
        writer.writerow([f"{a:.17g}", f"{b:.17g}", f"{z:.17g}", f"{value:.17g}"])
    return EXIT_OK


def _cmd_kernel(args) -> int:
    from .kernels import build_profile, save_profile_csv, verify_estimates

    if args.action == "verify":
        # the estimates need N > 4 beta; this is the smallest such 1-D case
        params = FractionalParams(args.alpha or 0.5, args.beta or 0.2, 1.0, args.dim or 1)
        report = verify_estimates(params, args.out)
        for row in report.rows:
            print(f"{row.bound_id:<10} {row.regime:<8} K={row.fitted_K:.6g} "
                  f"drift={row.refinement_drift:.2e}")
        return EXIT_OK
    if None in (args.kind, args.alpha, args.beta, args.dim):
        raise _UsageError("kernel needs --kind, --alpha, --beta and --dim")
    params = FractionalParams(args.alpha, args.beta, 1.0, args.dim)
    profile = build_profile(args.kind, params, args.resolution, args.r_max)
    save_profile_csv(profile, args.out)
    return EXIT_OK


class _UsageError(Exception):
    pass


def _cmd_simulate(args) -> int:
    config = parse_config(args.config)
    outcome = solve(config)
    criteria = compute_criteria(config)
    emit_results(outcome, criteria, args.out)
    if outcome.state is not None and not outcome.state.blown_up:
        save_state(outcome.state, Path(args.out) / "state.npz")
    logger.info("wall time %.2f s", outcome.wall_time)
    print(f"{outcome.status} t_detect={outcome.t_detect} steps={outcome.steps}")
    return EXIT_OK


def _cmd_continue(args) -> int:
    from .spectral_solver import continue_run

    state = load_state(args.state)
    outcome = continue_run(state, args.extra_T, boundary_tol=args.boundary_tol)
    emit_results(outcome, None, args.out)
    if not state.blown_up:
        save_state(state, Path(args.out) / "state.npz")
    print(f"{outcome.status} t_detect={outcome.t_detect} steps={outcome.steps}")
    return EXIT_OK


def _cmd_criteria(args) -> int:
    config = parse_config(args.config)
    out = compute_criteria(config, R0=args.R0, R_max=args.R_max)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, _json_bytes(out))
    return EXIT_OK


def _cmd_phase_diagram(args) -> int:
    from .experiments import phase_diagram

    config = parse_config(args.config)
    table = phase_diagram(config, _range_arg(args.p, False), _range_arg(args.amp, True),
                          workers=args.workers)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, table.to_csv().encode())
    for p, crit in table.critical.items():
        print(f"p={p:.6g} critical_amplitude={crit}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    from .experiments import convergence_study

    config = parse_config(args.config)
    study = convergence_study(config, _range_arg(args.dt, False))
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, study.to_csv().encode())
    print(f"fitted order {study.order:.4f}")
    return EXIT_OK


def _version_string() -> str:
    try:
        digest = calibration_hash()
    except OSError:
        digest = "missing"
    return f"fracfujita {__version__} calibration sha256:{digest}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracfujita",
                     description="Time- and space-fractional Fujita problem toolkit.")
    parser.add_argument("--version", action="version", version=_version_string())
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ml-eval", help="evaluate E_{a,b}(z) for z <= 0")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--grid", help="CSV of 'a,b,z' rows or of z values")
    p.set_defaults(func=_cmd_ml_eval)

    p = sub.add_parser("kernel", help="tabulate a kernel profile, or verify estimates")
    p.add_argument("action", nargs="?", choices=["verify"])
    p.add_argument("--kind", choices=["F", "G"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--r-max", dest="r_max", type=float, default=50.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("simulate", help="run one configured simulation")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("continue", help="extend a stored run")
    p.add_argument("--state", required=True)
    p.add_argument("--extra-T", dest="extra_T", type=float, required=True)
    p.add_argument("--boundary-tol", dest="boundary_tol", type=float, default=BOUNDARY_TOL)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_continue)

    p = sub.add_parser("criteria", help="exponents, weighted mass and certificate")
    p.add_argument("--config", required=True)
    p.add_argument("--R0", type=float, default=1.0e-2)
    p.add_argument("--R-max", dest="R_max", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_criteria)

    p = sub.add_parser("phase-diagram", help="outcome table over (p, amplitude)")
    p.add_argument("--config", required=True)
    p.add_argument("--p", required=True, help="lo:hi:count (linear) or a comma list")
    p.add_argument("--amp", required=True, help="lo:hi:count (geometric) or a comma list")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_phase_diagram)

    p = sub.add_parser("convergence", help="self-convergence in dt")
    p.add_argument("--config", required=True)
    p.add_argument("--dt", required=True, help="comma list; the finest is the reference")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fracfujita: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        for path, msg in exc.violations:
            print(f"invalid config: {path}: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"fracfujita: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"fracfujita: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

# }}}

# vim: foldmethod=marker
