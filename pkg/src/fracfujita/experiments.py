"""Multi-run studies: phase diagrams, decay rates, blow-up times, convergence.

Every study is a deterministic function of its configuration. Runs that
are independent may be spread over a process pool; results are merged by
grid index, so the output does not depend on the number of workers.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .criteria import blowup_certificate, exponents
from .spectral_solver import BLOWUP, GLOBAL, run, solve

logger = logging.getLogger(__name__)

__all__ = [
    "PhaseRow",
    "PhaseDiagram",
    "phase_diagram",
    "bisect_critical_amplitude",
    "decay_rate",
    "BlowupTimeRow",
    "blowup_time_study",
    "ConvergenceStudy",
    "convergence_study",
]


def _field_error(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.linalg.norm(b))
    return float(np.linalg.norm(a - b)) / (scale if scale > 0 else 1.0)


# {{{ phase diagram


@dataclass
class PhaseRow:
    p: float
    amplitude: float
    status: str
    signal: str
    t_detect: float | None
    critical_amplitude_flag: bool = False


@dataclass
class PhaseDiagram:
    """Outcome table over ``(p, amplitude)``.

    Attributes
    ----------
    rows : list of PhaseRow
        Grid runs, in ``(p, amplitude)`` order, followed by bisection runs.
    critical : dict
        ``p -> critical amplitude`` (None when no flip was bracketed).
    brackets : dict
        ``p -> (global amplitude, blow-up amplitude)`` around the flip.
    monotonicity_violations : list
        ``(p, a_low, a_high)`` where ``a_low`` blew up but ``a_high`` did not.
    """

    rows: list = field(default_factory=list)
    critical: dict = field(default_factory=dict)
    brackets: dict = field(default_factory=dict)
    monotonicity_violations: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "amplitude", "status", "t_detect", "critical_amplitude_flag"])
        for row in self.rows:
            t = "" if row.t_detect is None else repr(row.t_detect)
            writer.writerow([repr(row.p), repr(row.amplitude), row.status, t,
                             int(row.critical_amplitude_flag)])
        return buf.getvalue()


def _solve_signal(config, amplitude: float):
    """Run at one amplitude; returns ``(status, signal, t_detect)``."""
    if amplitude == 0:
        return GLOBAL, GLOBAL, None
    cfg = config.with_datum(config.datum.scaled(amplitude))
    outcome = solve(cfg)
    return outcome.status, outcome.signal, outcome.t_detect


def _solve_task(args):
    config, amplitude = args
    return _solve_signal(config, amplitude)


def bisect_critical_amplitude(config, low: float, high: float, *, rel_tol: float = 0.05,
                              max_calls: int = 12, record=None):
    """Geometric bisection between a global and a blowing-up amplitude.

    Classification uses the blow-up/global signal of each run. Returns the
    final bracket ``(low, high)``; the critical amplitude is reported as
    its geometric mean.
    """
    calls = 0
    while high / low - 1.0 > rel_tol and calls < max_calls:
        mid = math.sqrt(low * high)
        status, signal, t_detect = _solve_signal(config, mid)
        calls += 1
        if record is not None:
            record(mid, status, signal, t_detect)
        if signal == BLOWUP:
            high = mid
        else:
            low = mid
    return low, high


def phase_diagram(base_config, p_grid, amplitude_grid, *, rel_tol: float = 0.05,
                  max_calls: int = 12, workers: int = 1,
                  refine_detection: bool = False) -> PhaseDiagram:
    """Run every ``(p, amplitude)`` pair and bisect the flip for each ``p``.

    Amplitudes multiply the base datum. For ``p < p_f`` no critical
    amplitude is sought: every nontrivial nonnegative run should blow up.
    Inconclusive runs stay in the table with their underlying signal.

    Parameters
    ----------
    refine_detection : bool
        Whether grid runs repeat detected blow-ups at ``dt / 4``; off by
        default since only the signal is needed here.
    """
    p_grid = [float(p) for p in p_grid]
    amplitude_grid = sorted(float(a) for a in amplitude_grid)
    if not p_grid or not amplitude_grid:
        raise ValueError("p_grid and amplitude_grid must be nonempty")
    if any(p <= 1 for p in p_grid):
        raise ValueError("p values must exceed 1")
    base = replace(base_config, refine_detection=refine_detection)

    configs = {p: base.with_params(p=p) for p in p_grid}
    tasks = [(configs[p], a) for p in p_grid for a in amplitude_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_task, tasks))
    else:
        results = [_solve_task(t) for t in tasks]

    table = PhaseDiagram()
    for (cfg, a), (status, signal, t_detect) in zip(tasks, results):
        table.rows.append(PhaseRow(cfg.params.p, a, status, signal, t_detect))

    p_f = exponents(base.params).p_f
    for i, p in enumerate(p_grid):
        rows = table.rows[i * len(amplitude_grid):(i + 1) * len(amplitude_grid)]
        blown = [r.signal == BLOWUP for r in rows]
        for j in range(len(rows)):
            for k in range(j + 1, len(rows)):
                if blown[j] and not blown[k]:
                    table.monotonicity_violations.append((p, rows[j].amplitude,
                                                          rows[k].amplitude))
        table.critical[p] = None
        if p < p_f:
            continue
        flip = next((j for j in range(len(rows) - 1)
                     if not blown[j] and blown[j + 1]), None)
        if flip is None:
            continue
        low, high = rows[flip].amplitude, rows[flip + 1].amplitude
        if low == 0:
            low = high * 1.0e-6

        def record(a, status, signal, t_detect, p=p):
            table.rows.append(PhaseRow(p, a, status, signal, t_detect))

        low, high = bisect_critical_amplitude(configs[p], low, high, rel_tol=rel_tol,
                                              max_calls=max_calls, record=record)
        table.brackets[p] = (low, high)
        table.critical[p] = math.sqrt(low * high)
        for row in table.rows:
            if row.p == p and row.amplitude in (low, high):
                row.critical_amplitude_flag = True
    return table

# }}}


# {{{ decay rate


def decay_rate(norm_trace, q: float, fit_window) -> float:
    """Least-squares slope of ``log ||u||_q`` against ``log t`` on a window.

    Parameters
    ----------
    norm_trace : SimulationOutcome or tuple
        An outcome, or ``(times, values)`` for the chosen ``q``.
    q : float
        Which trace of an outcome to use (ignored for a tuple).
    fit_window : (float, float)
        ``(t_lo, t_hi)`` with ``0 < t_lo < t_hi``.
    """
    if hasattr(norm_trace, "norm_traces"):
        times, values = norm_trace.times, norm_trace.norm_traces[float(q)]
    else:
        times, values = norm_trace
    times, values = np.asarray(times, dtype=float), np.asarray(values, dtype=float)
    t_lo, t_hi = fit_window
    if not 0 < t_lo < t_hi:
        raise ValueError(f"degenerate fit window ({t_lo}, {t_hi})")
    mask = (times >= t_lo) & (times <= t_hi)
    if mask.sum() < 3:
        raise ValueError(f"fewer than 3 samples in the window ({t_lo}, {t_hi})")
    if times[-1] < t_hi * (1 - 1e-12):
        raise ValueError(f"window end {t_hi} beyond the run (last time {times[-1]})")
    if not np.all(values[mask] > 0):
        raise ValueError("the trace must be positive on the window")
    slope, _ = np.polyfit(np.log(times[mask]), np.log(values[mask]), 1)
    return float(slope)

# }}}


# {{{ blow-up times


@dataclass
class BlowupTimeRow:
    amplitude: float
    R_star: float
    time_bound: float
    status: str
    signal: str
    t_detect: float | None
    refinement_shift: float | None

    @property
    def bound_holds(self) -> bool:
        return (self.signal == BLOWUP and self.t_detect is not None
                and self.t_detect <= self.time_bound)


def blowup_time_study(config, amplitudes, threshold_C: float, *,
                      R0: float = 1.0e-3) -> tuple:
    """Compare detected blow-up times with the certified bound ``4 R_star``.

    Amplitudes without a certificate are left out. Returns
    ``(rows, violations)``, where a violation is a certified run that did
    not blow up by ``4 R_star``.
    """
    rows, violations = [], []
    for a in amplitudes:
        datum = config.datum.scaled(a)
        u0 = datum if hasattr(datum, "ball_integral") else datum.field(config.grid)
        R_max = (0.9 * config.grid.half_width) ** (1.0 / config.params.kappa)
        cert = blowup_certificate(u0, threshold_C, config.params, R0=R0, R_max=R_max)
        if not cert.present:
            continue
        outcome = solve(config.with_datum(datum))
        row = BlowupTimeRow(amplitude=float(a), R_star=cert.R_star,
                            time_bound=cert.time_bound, status=outcome.status,
                            signal=outcome.signal, t_detect=outcome.t_detect,
                            refinement_shift=outcome.diagnostics.get("refinement_shift"))
        rows.append(row)
        if not row.bound_holds:
            violations.append(row)
    return rows, violations

# }}}


# {{{ convergence


@dataclass
class ConvergenceStudy:
    """Self-convergence errors against the finest step.

    Attributes
    ----------
    dt_list : numpy.ndarray
        Steps, decreasing; the last is the reference.
    errors : numpy.ndarray
        Relative ``L^2`` error of the final field (0 for the reference).
    order : float
        Least-squares slope of ``log error`` against ``log dt`` over the
        non-reference steps; NaN if any of those errors is exactly 0.
    """

    dt_list: np.ndarray
    errors: np.ndarray
    order: float
    statuses: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dt", "error", "status"])
        for dt, err, status in zip(self.dt_list, self.errors, self.statuses):
            writer.writerow([repr(float(dt)), repr(float(err)), status])
        writer.writerow(["order", repr(self.order), ""])
        return buf.getvalue()


def convergence_study(config, dt_list) -> ConvergenceStudy:
    """Run at every ``dt`` to ``config.T_max`` and fit the observed order.

    Parameters
    ----------
    dt_list : sequence of float
        At least three steps; the smallest is the reference solution.
    """
    dt_list = np.array(sorted((float(d) for d in dt_list), reverse=True))
    if dt_list.size < 3:
        raise ValueError("need at least 3 time steps")
    u0 = config.initial_field()
    finals, statuses = [], []
    for dt in dt_list:
        outcome = run(u0, config.params, dt, config.T_max,
                      nonlinearity=config.nonlinearity,
                      cap_factor=config.blowup_cap_factor, q_list=config.q_list,
                      boundary_tol=config.boundary_tol)
        if outcome.signal == BLOWUP:
            raise ValueError(f"run with dt={dt} blew up at t={outcome.t_detect}; "
                             "self-convergence needs a finite solution on [0, T_max]")
        finals.append(outcome.state.current)
        statuses.append(outcome.status)
    reference = finals[-1]
    errors = np.array([_field_error(u, reference) for u in finals])
    if np.all(errors[:-1] > 0):
        order = float(np.polyfit(np.log(dt_list[:-1]), np.log(errors[:-1]), 1)[0])
    else:
        # exact runs (e.g. f = 0) have no measurable order
        order = math.nan
    return ConvergenceStudy(dt_list=dt_list, errors=errors, order=order,
                            statuses=statuses)

# }}}

# vim: foldmethod=marker
