"""Pseudo-spectral solver for the mild formulation on a periodic box.

The mild solution of

.. math::

    \\partial_t^\\alpha u + (-\\Delta)^\\beta u = f(u), \\qquad u(0) = u_0,

is, mode by mode with :math:`\\lambda = |\\xi|^{2\\beta}`,

.. math::

    \\hat u(\\xi, t) = E_{\\alpha}(-\\lambda t^\\alpha) \\hat u_0(\\xi)
        + \\int_0^t (t - s)^{\\alpha - 1}
          E_{\\alpha,\\alpha}(-\\lambda (t - s)^\\alpha) \\hat f(\\xi, s)\\, ds.

The memory integral is discretised by product integration: ``f`` is frozen
at the left end of each step and the kernel is integrated exactly,

.. math::

    \\hat u_n = E_\\alpha(-\\lambda t_n^\\alpha) \\hat u_0
        + \\sum_{j < n} w_{n - j} \\hat f_j, \\qquad
    w_m = W(m\\,\\Delta t) - W((m - 1)\\Delta t),

with :math:`W(\\tau) = \\tau^\\alpha E_{\\alpha,1+\\alpha}(-\\lambda\\tau^\\alpha)`.

The discrete convolution is evaluated exactly (not compressed) in
:math:`O(n_t \\log^2 n_t)` per mode by the online dyadic splitting: at step
``t`` with ``s = t & -t`` the block :math:`\\hat f_{t-s..t-1}` is convolved
with :math:`w_{1..2s-1}` and added to the pending sums of steps
``t..t+s-1``. Blocks of length ``s > 8`` use FFTs.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .kernels import FractionalParams
from .special_functions import mittag_leffler, ml_weight

logger = logging.getLogger(__name__)

__all__ = [
    "Grid",
    "Field",
    "SpectralHistory",
    "SimulationOutcome",
    "PicardResult",
    "GLOBAL",
    "BLOWUP",
    "INCONCLUSIVE",
    "CannotContinueError",
    "NonContractionError",
    "make_nonlinearity",
    "linear_evolve",
    "start",
    "step",
    "advance",
    "run",
    "solve",
    "continue_run",
    "picard_iterate",
    "picard_time",
    "lq_norm",
]

#: Shell-average to maximum ratio above which a run is inconclusive.
BOUNDARY_TOL = 1.0e-6

GLOBAL = "GlobalUpToTmax"
BLOWUP = "BlowUpDetected"
INCONCLUSIVE = "Inconclusive"


class CannotContinueError(RuntimeError):
    pass


class NonContractionError(RuntimeError):
    """Picard iteration failed to contract; carries the observed ratios."""

    def __init__(self, message: str, ratios) -> None:
        super().__init__(message)
        self.ratios = list(ratios)


# {{{ grid and fields


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[-L, L)^N`` with ``n`` points per axis."""

    dim: int
    half_width: float
    n: int

    def __post_init__(self) -> None:
        errors = []
        if self.dim not in (1, 2, 3):
            errors.append(f"dim must be 1, 2 or 3: got {self.dim}")
        if not self.half_width > 0:
            errors.append(f"half_width must be positive: got {self.half_width}")
        if self.n < 32 or self.n & (self.n - 1):
            errors.append(f"n must be a power of two >= 32: got {self.n}")
        if errors:
            raise ValueError("; ".join(errors))
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def spectral_shape(self) -> tuple:
        return (self.n,) * (self.dim - 1) + (self.n // 2 + 1,)

    def axis(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.n)

    def coordinates(self) -> list:
        """Coordinate arrays broadcastable to :attr:`shape`."""
        x = self.axis()
        return list(np.meshgrid(*([x] * self.dim), indexing="ij", sparse=True))

    def radius(self) -> np.ndarray:
        r2 = sum(c**2 for c in self.coordinates())
        return np.sqrt(np.broadcast_to(r2, self.shape))

    def wavenumbers(self) -> list:
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, self.spacing)
        k_last = 2.0 * np.pi * np.fft.rfftfreq(self.n, self.spacing)
        axes = [k] * (self.dim - 1) + [k_last]
        return list(np.meshgrid(*axes, indexing="ij", sparse=True))

    def symbol(self, beta: float) -> np.ndarray:
        """``|xi|^{2 beta}`` on the real-FFT layout."""
        xi2 = sum(k**2 for k in self.wavenumbers())
        return np.broadcast_to(xi2, self.spectral_shape) ** beta

    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule: keep modes with every ``|k_i| <= 2/3 k_max``."""
        k_max = np.pi / self.spacing
        mask = np.ones(self.spectral_shape, dtype=bool)
        for k in self.wavenumbers():
            mask &= np.abs(k) <= (2.0 / 3.0) * k_max
        return mask

    def shell_mask(self, fraction: float = 0.1) -> np.ndarray:
        """Points in the outer *fraction* of the box (max-norm shell)."""
        inner = (1.0 - fraction) * self.half_width
        mask = np.zeros(self.shape, dtype=bool)
        for c in self.coordinates():
            mask |= np.broadcast_to(np.abs(c) > inner, self.shape)
        return mask

    def forward(self, values: np.ndarray) -> np.ndarray:
        return sfft.rfftn(values, s=self.shape)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return sfft.irfftn(coeffs, s=self.shape)


@dataclass(frozen=True)
class Field:
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(f"field shape {values.shape} does not match grid "
                             f"shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)


def lq_norm(fld: Field, q: float) -> float:
    """Midpoint-rule ``L^q`` norm; the grid maximum for ``q = inf``."""
    if not q >= 1:
        raise ValueError(f"q must be >= 1: got {q}")
    return _lq(fld.values, q, fld.grid.cell_volume)


def _lq(values: np.ndarray, q: float, cell: float) -> float:
    a = np.abs(values)
    if math.isinf(q):
        return float(a.max())
    if q == 1:
        return float(a.sum() * cell)
    # scale by the maximum so a**q neither underflows nor overflows
    scale = float(a.max())
    if not 0 < scale < math.inf:
        return scale
    return scale * float(((a / scale) ** q).sum() * cell) ** (1.0 / q)

# }}}


# {{{ nonlinearity


def make_nonlinearity(name: str, p: float):
    """``power``: ``|u|^{p-1} u``; ``lipschitz_demo``: ``sin(u)``."""
    if name == "power":
        if p == 1.0:
            return lambda u: u.copy()
        if p == 2.0:
            return lambda u: np.abs(u) * u
        return lambda u: np.abs(u) ** (p - 1.0) * u
    if name == "lipschitz_demo":
        return np.sin
    if name == "zero":
        return np.zeros_like
    raise ValueError(f"unknown nonlinearity: {name!r}")

# }}}


# {{{ weight tables

_BLOCK = 512


class _Tables:
    """Mittag-Leffler factors for one ``(alpha, dt, lambda)`` set.

    Values are computed in blocks of fixed global step indices, so an entry
    never depends on how far a run reaches; this is what makes continued
    runs bitwise identical to single runs.
    """

    def __init__(self, alpha: float, dt: float, lam: np.ndarray, active: np.ndarray):
        self.alpha = alpha
        self.dt = dt
        self.lam, self.lam_inverse = np.unique(lam, return_inverse=True)
        self.active_unique = np.unique(self.lam_inverse[active])
        self._lin_blocks: dict[int, np.ndarray] = {}
        self._cum = np.zeros((self.active_unique.size, 0))
        self._wfft: dict[int, np.ndarray] = {}

    def linear(self, m: int) -> np.ndarray:
        """``E_alpha(-lambda (m dt)^alpha)`` for every unique ``lambda``."""
        b = m // _BLOCK
        block = self._lin_blocks.get(b)
        if block is None:
            tau = self.dt * np.arange(b * _BLOCK, (b + 1) * _BLOCK)
            block = mittag_leffler(-np.outer(self.lam, tau**self.alpha), self.alpha, 1.0)
            self._lin_blocks[b] = block
        return block[:, m - b * _BLOCK]

    def cumulative(self, m_end: int) -> np.ndarray:
        """``W(m dt)`` for ``m < m_end`` on the active unique ``lambda``."""
        have = self._cum.shape[1]
        if m_end > have:
            nblocks = -(-m_end // _BLOCK)
            new = []
            for b in range(have // _BLOCK, nblocks):
                tau = self.dt * np.arange(b * _BLOCK, (b + 1) * _BLOCK)
                new.append(ml_weight(self.lam[self.active_unique][:, None],
                                     self.alpha, np.maximum(tau, 1.0e-300)[None, :]))
                new[-1][:, tau == 0] = 0.0
            self._cum = np.concatenate([self._cum] + new, axis=1)
        return self._cum

    def increments(self, lo: int, hi: int) -> np.ndarray:
        """``w_m = W(m dt) - W((m - 1) dt)`` for ``lo <= m < hi`` (``w_0 = 0``)."""
        cum = self.cumulative(hi)
        w = np.empty((cum.shape[0], hi - lo))
        start = max(lo, 1)
        w[:, start - lo:] = cum[:, start:hi] - cum[:, start - 1:hi - 1]
        if lo == 0:
            w[:, 0] = 0.0
        return w

    def increments_fft(self, s: int) -> np.ndarray:
        """Real FFT of ``w_0 .. w_{2s-1}`` (length ``2s``)."""
        out = self._wfft.get(s)
        if out is None:
            out = sfft.rfft(self.increments(0, 2 * s), axis=1)
            self._wfft[s] = out
        return out


_TABLE_CACHE: dict = {}


def _tables(alpha: float, dt: float, grid: Grid, beta: float) -> _Tables:
    key = (alpha, dt, beta, grid)
    tables = _TABLE_CACHE.get(key)
    if tables is None:
        lam = grid.symbol(beta).ravel()
        active = np.nonzero(grid.dealias_mask().ravel())[0]
        tables = _Tables(alpha, dt, lam, active)
        if len(_TABLE_CACHE) >= 8:
            _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
        _TABLE_CACHE[key] = tables
    return tables


def clear_table_cache() -> None:
    _TABLE_CACHE.clear()

# }}}


# {{{ linear evolution


def linear_evolve(u0_hat: np.ndarray, t: float, params: FractionalParams,
                  grid: Grid) -> np.ndarray:
    """Multiply each mode by ``E_alpha(-|xi|^{2 beta} t^alpha)``."""
    if t < 0:
        raise ValueError(f"t must be nonnegative: got {t}")
    if t == 0:
        return np.array(u0_hat, copy=True)
    lam = grid.symbol(params.beta)
    factor = mittag_leffler(-lam * t**params.alpha, params.alpha, 1.0)
    return u0_hat * factor

# }}}


# {{{ state


@dataclass
class SpectralHistory:
    """Everything needed to advance or continue a run.

    The memory term needs the nonlinearity at every past step, so the full
    history of its (dealiased) Fourier coefficients is kept.
    """

    params: FractionalParams
    grid: Grid
    dt: float
    nonlinearity: str
    u0: np.ndarray
    cap: float
    q_list: tuple
    mode_order: str = "natural"
    steps: int = 0
    current: np.ndarray | None = None
    current_hat: np.ndarray | None = None
    f_hist: np.ndarray | None = None
    pending: np.ndarray | None = None
    trace_times: list = field(default_factory=list)
    traces: dict = field(default_factory=dict)
    shell_ratio_max: float = 0.0
    blown_up: bool = False
    snapshot_every: int = 0
    snapshots: list = field(default_factory=list)

    @property
    def time(self) -> float:
        return self.steps * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.steps + 1)

    # {{{ derived, not stored

    def _setup(self):
        grid = self.grid
        tables = _tables(self.params.alpha, self.dt, grid, self.params.beta)
        active = np.nonzero(grid.dealias_mask().ravel())[0]
        if self.mode_order == "reversed":
            active = active[::-1]
        elif self.mode_order != "natural":
            raise ValueError(f"unknown mode order: {self.mode_order!r}")
        # row of each active mode in the active-unique weight table
        position = np.searchsorted(tables.active_unique, tables.lam_inverse[active])
        u0_hat = grid.forward(self.u0).ravel()
        return tables, active, position, u0_hat

    # }}}


def _record(state: SpectralHistory, u: np.ndarray, shell: np.ndarray) -> float:
    cell = state.grid.cell_volume
    state.trace_times.append(state.time)
    for q in state.q_list:
        state.traces[q].append(_lq(u, q, cell))
    peak = float(np.abs(u).max())
    if peak > 0 and np.isfinite(peak):
        ratio = float(np.abs(u[shell]).mean()) / peak
        state.shell_ratio_max = max(state.shell_ratio_max, ratio)
    if state.snapshot_every and state.steps % state.snapshot_every == 0:
        state.snapshots.append((state.time, u.copy()))
    return peak


def start(u0: Field, params: FractionalParams, dt: float, *, nonlinearity: str = "power",
          cap_factor: float = 1.0e6, q_list=(1.0, 2.0, math.inf),
          mode_order: str = "natural", snapshot_every: int = 0) -> SpectralHistory:
    """Initial state at ``t = 0``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive: got {dt}")
    if u0.grid.dim != params.dim:
        raise ValueError(f"grid dimension {u0.grid.dim} differs from "
                         f"params.dim {params.dim}")
    values = u0.values
    cap = cap_factor * max(1.0, float(np.abs(values).max()))
    state = SpectralHistory(
        params=params, grid=u0.grid, dt=float(dt), nonlinearity=nonlinearity,
        u0=values.copy(), cap=cap, q_list=tuple(float(q) for q in q_list),
        mode_order=mode_order, snapshot_every=snapshot_every)
    state.traces = {q: [] for q in state.q_list}

    _, active, _, _ = state._setup()
    state.current = values.copy()
    state.current_hat = u0.grid.forward(values)
    state.f_hist = np.zeros((active.size, 64), dtype=complex)
    state.pending = np.zeros((active.size, 128), dtype=complex)
    f = make_nonlinearity(nonlinearity, params.p)
    state.f_hist[:, 0] = u0.grid.forward(f(values)).ravel()[active]
    _record(state, values, u0.grid.shell_mask())
    return state


def _grow(a: np.ndarray, size: int) -> np.ndarray:
    if a.shape[1] >= size:
        return a
    new = np.zeros((a.shape[0], max(size, 2 * a.shape[1])), dtype=a.dtype)
    new[:, :a.shape[1]] = a
    return new


def advance(state: SpectralHistory, nsteps: int) -> SpectralHistory:
    """Advance *state* in place by up to *nsteps* steps.

    Stops early, setting ``state.blown_up``, when the solution becomes
    non-finite or exceeds the cap.
    """
    if state.blown_up:
        raise CannotContinueError("the run has already blown up")

    grid = state.grid
    tables, active, position, u0_hat = state._setup()
    f = make_nonlinearity(state.nonlinearity, state.params.p)
    shell = grid.shell_mask()
    lam_index = tables.lam_inverse
    spectral_shape = grid.spectral_shape

    target = state.steps + nsteps
    state.f_hist = _grow(state.f_hist, target + 1)
    state.pending = _grow(state.pending, 2 * target + 2)
    f_hist, pending = state.f_hist, state.pending

    for t in range(state.steps + 1, target + 1):
        # add the block f_{t-s..t-1} to the pending sums of steps t..t+s-1
        s = t & -t
        block = f_hist[:, t - s:t]
        if s <= 8:
            w = tables.increments(0, 2 * s)[position]
            idx = s + np.arange(s)[:, None] - np.arange(s)[None, :]
            pending[:, t:t + s] += np.einsum("kqp,kp->kq", w[:, idx], block)
        else:
            wf = tables.increments_fft(s)[position]
            re = sfft.irfft(sfft.rfft(block.real, n=2 * s, axis=1) * wf, n=2 * s, axis=1)
            im = sfft.irfft(sfft.rfft(block.imag, n=2 * s, axis=1) * wf, n=2 * s, axis=1)
            pending[:, t:t + s] += (re + 1j * im)[:, s:]

        u_hat = tables.linear(t)[lam_index] * u0_hat
        u_hat[active] += pending[:, t]
        u_hat = u_hat.reshape(spectral_shape)
        u = grid.inverse(u_hat)

        state.steps = t
        state.current = u
        state.current_hat = u_hat
        peak = _record(state, u, shell)
        if not np.isfinite(peak) or peak > state.cap:
            state.blown_up = True
            break
        f_hist[:, t] = grid.forward(f(u)).ravel()[active]

    return state


def step(state: SpectralHistory, dt: float | None = None, nonlinearity=None) -> SpectralHistory:
    """Advance by one step of the state's fixed ``dt``.

    Parameters
    ----------
    dt : float, optional
        Must equal ``state.dt`` if given; the weights are tied to one step.
    """
    if dt is not None and dt != state.dt:
        raise ValueError(f"step size is fixed at {state.dt}; got {dt}")
    if nonlinearity is not None and nonlinearity != state.nonlinearity:
        raise ValueError("the nonlinearity is fixed when the run starts")
    return advance(state, 1)

# }}}


# {{{ outcomes


@dataclass
class SimulationOutcome:
    """Result of a run.

    Attributes
    ----------
    status : str
        :data:`GLOBAL`, :data:`BLOWUP` or :data:`INCONCLUSIVE`.
    t_detect : float or None
        Time at which the cap was exceeded, for blow-up (also kept for
        inconclusive runs whose underlying signal was blow-up).
    reason : str or None
        Why an inconclusive run is inconclusive.
    times : numpy.ndarray
    norm_traces : dict
        ``q -> array`` of ``||u(t)||_q`` at ``times``.
    steps : int
    wall_time : float
    diagnostics : dict
    state : SpectralHistory or None
        Final state, for continuation.
    """

    status: str
    t_detect: float | None
    reason: str | None
    times: np.ndarray
    norm_traces: dict
    steps: int
    wall_time: float
    diagnostics: dict
    state: SpectralHistory | None = None

    @property
    def signal(self) -> str:
        """Blow-up/global signal before the boundary and refinement checks."""
        return self.diagnostics.get("signal", self.status)


def _outcome(state: SpectralHistory, wall: float, boundary_tol: float) -> SimulationOutcome:
    signal = BLOWUP if state.blown_up else GLOBAL
    status, reason = signal, None
    # For nonnegative data the periodised kernels dominate the whole-space
    # ones, so the box solution is an upper bound: a global box run is global
    # on the whole space regardless of what reaches the boundary.
    exempt = signal == GLOBAL and bool(np.all(state.u0 >= 0))
    if state.shell_ratio_max > boundary_tol and not exempt:
        status = INCONCLUSIVE
        reason = (f"boundary contamination: shell/max ratio "
                  f"{state.shell_ratio_max:.3g} exceeds {boundary_tol:g}")
    return SimulationOutcome(
        status=status,
        t_detect=state.time if state.blown_up else None,
        reason=reason,
        times=np.array(state.trace_times),
        norm_traces={q: np.array(v) for q, v in state.traces.items()},
        steps=state.steps,
        wall_time=wall,
        diagnostics={"signal": signal, "shell_ratio_max": state.shell_ratio_max,
                     "boundary_tol": boundary_tol, "cap": state.cap,
                     "dt": state.dt},
        state=state)


def run(u0: Field, params: FractionalParams, dt: float, T_max: float, *,
        nonlinearity: str = "power", cap_factor: float = 1.0e6,
        q_list=(1.0, 2.0, math.inf), boundary_tol: float = BOUNDARY_TOL,
        mode_order: str = "natural", snapshot_every: int = 0) -> SimulationOutcome:
    """Single run at fixed ``dt`` without detection-time refinement."""
    wall = time.perf_counter()
    nsteps = int(round(T_max / dt))
    if abs(nsteps * dt - T_max) > 1.0e-9 * max(1.0, T_max):
        raise ValueError(f"T_max={T_max} is not a multiple of dt={dt}")
    state = start(u0, params, dt, nonlinearity=nonlinearity, cap_factor=cap_factor,
                  q_list=q_list, mode_order=mode_order, snapshot_every=snapshot_every)
    advance(state, nsteps)
    return _outcome(state, time.perf_counter() - wall, boundary_tol)


def solve(config) -> SimulationOutcome:
    """Run a configured simulation, refining any detected blow-up time.

    *config* provides ``params``, ``grid``, ``dt``, ``T_max``, ``q_list``,
    ``blowup_cap_factor``, ``nonlinearity``, ``boundary_tol``,
    ``refine_detection`` and ``initial_field()``
    (see :class:`fracfujita.cli_io.SimulationConfig`).

    A detected blow-up is confirmed by repeating the run with ``dt / 4``; if
    the detection time moves by 10% or more the run is inconclusive.
    """
    u0 = config.initial_field()
    kwargs = dict(nonlinearity=config.nonlinearity, cap_factor=config.blowup_cap_factor,
                  q_list=config.q_list, boundary_tol=config.boundary_tol,
                  snapshot_every=getattr(config, "snapshot_every", 0))
    outcome = run(u0, config.params, config.dt, config.T_max, **kwargs)

    if outcome.signal == BLOWUP and config.refine_detection:
        fine = run(u0, config.params, config.dt / 4.0, config.T_max, **kwargs)
        outcome.wall_time += fine.wall_time
        diag = outcome.diagnostics
        diag["t_detect_refined"] = fine.t_detect
        if fine.signal != BLOWUP:
            shift = math.inf
        else:
            shift = abs(fine.t_detect - outcome.t_detect) / outcome.t_detect
        diag["refinement_shift"] = shift
        if shift >= 0.1 and outcome.status == BLOWUP:
            outcome.status = INCONCLUSIVE
            outcome.reason = (f"detection time not stable under dt/4: "
                              f"relative shift {shift:.3g}")
    return outcome


def continue_run(state: SpectralHistory, extra_T: float, *,
                 boundary_tol: float = BOUNDARY_TOL) -> SimulationOutcome:
    """Extend a finished run by *extra_T*, reusing its full history.

    The step sequence is identical to that of a single longer run, so the
    result agrees with it bit for bit.
    """
    if state.blown_up:
        raise CannotContinueError("cannot continue a run that blew up")
    if not extra_T > 0:
        raise ValueError(f"extra_T must be positive: got {extra_T}")
    nsteps = int(round(extra_T / state.dt))
    wall = time.perf_counter()
    advance(state, nsteps)
    return _outcome(state, time.perf_counter() - wall, boundary_tol)

# }}}


# {{{ Picard iteration


@dataclass
class PicardResult:
    """Iterates on ``[0, t0]`` and their successive distances.

    Attributes
    ----------
    iterates : list of numpy.ndarray
        Each iterate as an array ``(steps + 1, *grid.shape)``.
    distances : numpy.ndarray
        ``d_k = sup_t ||v^{k+1}(t) - v^k(t)||_q``.
    ratios : numpy.ndarray
        ``d_{k+1} / d_k``.
    times : numpy.ndarray
    """

    iterates: list
    distances: np.ndarray
    ratios: np.ndarray
    times: np.ndarray


def picard_time(params: FractionalParams, sup_norm: float, K: float | None = None) -> float:
    """Largest ``t0`` with ``p K (2 C0)^{p-1} t0^alpha / alpha <= 1/2``.

    This is the contraction condition in ``L^inf``, where the forcing kernel
    has ``||Y(t)||_1 = K t^{alpha - 1}`` with ``K = 1 / Gamma(alpha)`` exactly.
    """
    if K is None:
        K = 1.0 / math.gamma(params.alpha)
    if sup_norm == 0:
        return math.inf
    growth = params.p * K * (2.0 * sup_norm) ** (params.p - 1.0)
    return (params.alpha / (2.0 * growth)) ** (1.0 / params.alpha)


def picard_iterate(u0: Field, t0: float, max_iter: int, params: FractionalParams,
                   dt: float, *, q: float = math.inf, nonlinearity: str = "power",
                   raise_on_growth: bool = False, roundoff: float = 1.0e-13) -> PicardResult:
    """Fixed-point iterates ``v^{k+1} = L u0 + N(v^k)`` on the step grid.

    Uses the same weights as the time stepper, so the fixed point is the
    stepped solution on ``[0, t0]``. Iteration stops early once successive
    iterates agree to *roundoff* relative to their norm.
    """
    if not t0 > 0:
        raise ValueError(f"t0 must be positive: got {t0}")
    grid = u0.grid
    nsteps = int(round(t0 / dt))
    if nsteps < 1:
        raise ValueError("t0 is shorter than one step")
    tables = _tables(params.alpha, dt, grid, params.beta)
    active = np.nonzero(grid.dealias_mask().ravel())[0]
    position = np.searchsorted(tables.active_unique, tables.lam_inverse[active])
    f = make_nonlinearity(nonlinearity, params.p)
    u0_hat = grid.forward(u0.values).ravel()
    cell = grid.cell_volume

    lin = np.stack([tables.linear(m)[tables.lam_inverse] * u0_hat
                    for m in range(nsteps + 1)], axis=1)
    size = sfft.next_fast_len(2 * (nsteps + 1), real=True)
    w = tables.increments(0, nsteps + 1)[position]
    w_hat = sfft.rfft(w, n=size, axis=1)

    def physical(coeffs):
        return np.stack([grid.inverse(coeffs[:, m].reshape(grid.spectral_shape))
                         for m in range(coeffs.shape[1])])

    v = physical(lin)
    iterates, distances = [v], []
    for _ in range(max_iter):
        f_hat = np.stack([grid.forward(f(v[m])).ravel()[active]
                          for m in range(nsteps + 1)], axis=1)
        # sum_{j < m} w_{m-j} f_j as a linear convolution (w_0 = 0)
        re = sfft.irfft(sfft.rfft(f_hat.real, n=size, axis=1) * w_hat, n=size, axis=1)
        im = sfft.irfft(sfft.rfft(f_hat.imag, n=size, axis=1) * w_hat, n=size, axis=1)
        coeffs = lin.copy()
        coeffs[active] += (re + 1j * im)[:, :nsteps + 1]
        v_new = physical(coeffs)
        distances.append(max(_lq(v_new[m] - v[m], q, cell) for m in range(nsteps + 1)))
        v = v_new
        iterates.append(v)
        # below this the distances measure rounding, not contraction
        if distances[-1] <= roundoff * max(_lq(v[m], q, cell) for m in range(nsteps + 1)):
            break

    distances = np.array(distances)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(distances[:-1] > 0, distances[1:] / distances[:-1], 0.0)
    if raise_on_growth and np.any(ratios[1:] >= 1.0):
        raise NonContractionError("Picard iterates do not contract; t0 too large", ratios)
    return PicardResult(iterates=iterates, distances=distances, ratios=ratios,
                        times=dt * np.arange(nsteps + 1))

# }}}

# vim: foldmethod=marker
