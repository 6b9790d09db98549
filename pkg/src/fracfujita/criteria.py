"""Exponents and integral functionals behind the global/blow-up dichotomy.

For ``f(u) = |u|^{p-1} u`` the relevant exponents are

* ``ell = N (p - 1) / (2 beta)``, the scaling-invariant Lebesgue exponent;
* ``p_f = 1 + 2 beta / N``, the Fujita exponent;
* ``p_c = N / (N - 2 beta)``, the integrability limit of the kernel ``Z``;
* ``b(q) = (N alpha / 2 beta)(1/ell - 1/q)``, the decay rate of small
  global solutions in ``L^q``;
* ``sigma(r) = 1 - alpha + (N alpha / 2 beta)(1 - 1/r)``, the singularity of
  ``||Y(t)||_r`` at ``t = 0``.

Both the small-data condition for global existence and the large-data
condition for blow-up are phrased through the weighted mass

.. math::

    M(R) = R^{\\alpha/(p-1) - N\\alpha/(2\\beta)}
        \\int_{|x| < R^{\\alpha/2\\beta}} u_0(x)\\, dx,

and the blow-up argument runs through the space-time functional
:math:`J(T; b)` tested against a truncated backward cone.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import optimize
from scipy import special as sc

from .kernels import FractionalParams, RadialProfile, ball_volume
from .spectral_solver import Field, Grid

logger = logging.getLogger(__name__)

__all__ = [
    "ExponentReport",
    "RangeClass",
    "MassReport",
    "BlowupCertificate",
    "BallExceedsBoxError",
    "InsufficientSnapshotsError",
    "GaussianDatum",
    "IndicatorDatum",
    "SnapshotHistory",
    "exponents",
    "classify_q",
    "mass_exponent",
    "ball_integral",
    "mass_functional",
    "sup_mass",
    "blowup_certificate",
    "j_functional",
    "a_functional",
    "load_calibration",
    "calibration_hash",
    "calibration_key",
    "GOOD",
    "DISTINGUISHED",
    "OUTSIDE",
]

GOOD = "GoodRange"
DISTINGUISHED = "DistinguishedRange"
OUTSIDE = "OutsideGood"


class BallExceedsBoxError(ValueError):
    """Raised when an integration ball reaches the truncated box."""


class InsufficientSnapshotsError(ValueError):
    """Raised when stored snapshots do not cover the requested time span."""


# {{{ exponents


@dataclass(frozen=True)
class ExponentReport:
    """Closed-form exponents for one parameter set.

    Attributes
    ----------
    ell : float
        ``N (p - 1) / (2 beta)``.
    p_f : float
        Fujita exponent ``1 + 2 beta / N``.
    p_c : float
        ``N / (N - 2 beta)``, or ``inf`` when ``N <= 2 beta``.
    """

    params: FractionalParams
    ell: float
    p_f: float
    p_c: float

    def b_decay(self, q: float) -> float:
        """Decay exponent ``(N alpha / 2 beta)(1/ell - 1/q)``."""
        inv_ell = math.inf if self.ell == 0 else 1.0 / self.ell
        return self.params.z_decay * (inv_ell - 1.0 / q)

    def sigma(self, r: float) -> float:
        """``1 - alpha + (N alpha / 2 beta)(1 - 1/r)``."""
        return 1.0 - self.params.alpha + self.params.z_decay * (1.0 - 1.0 / r)

    def as_dict(self) -> dict:
        return {"ell": self.ell, "p_f": self.p_f, "p_c": self.p_c}


def exponents(params: FractionalParams) -> ExponentReport:
    n, beta = params.dim, params.beta
    p_c = math.inf if n <= 2.0 * beta else n / (n - 2.0 * beta)
    return ExponentReport(params=params,
                          ell=n * (params.p - 1.0) / (2.0 * beta),
                          p_f=1.0 + 2.0 * beta / n,
                          p_c=p_c)


@dataclass(frozen=True)
class RangeClass:
    """Position of a Lebesgue exponent ``q`` relative to the good ranges.

    Attributes
    ----------
    tag : str
        :data:`DISTINGUISHED`, :data:`GOOD` or :data:`OUTSIDE`.
    witnesses : dict
        Each defining inequality with its truth value.
    """

    q: float
    tag: str
    witnesses: dict

    @property
    def good(self) -> bool:
        return self.tag in (GOOD, DISTINGUISHED)

    @property
    def distinguished(self) -> bool:
        return self.tag == DISTINGUISHED


def classify_q(q: float, params: FractionalParams) -> RangeClass:
    """Classify ``q`` against ``(ell, inf]`` and ``(ell, ell p]``, with ``q >= p``."""
    if not q >= 1.0:
        raise ValueError(f"q must be >= 1: got {q}")
    ell = exponents(params).ell
    witnesses = {
        "q > ell": q > ell,
        "q >= p": q >= params.p,
        "q <= ell*p": q <= ell * params.p,
    }
    tag = OUTSIDE
    if witnesses["q > ell"] and witnesses["q >= p"]:
        tag = DISTINGUISHED if witnesses["q <= ell*p"] else GOOD
    return RangeClass(q=float(q), tag=tag, witnesses=witnesses)

# }}}


# {{{ initial data


@dataclass(frozen=True)
class GaussianDatum:
    """``u0(x) = amplitude * exp(-|x|^2 / width^2)``."""

    amplitude: float
    width: float = 1.0

    def values(self, grid: Grid) -> np.ndarray:
        return self.amplitude * np.exp(-grid.radius() ** 2 / self.width**2)

    def field(self, grid: Grid) -> Field:
        return Field(grid, self.values(grid))

    def ball_integral(self, rho, dim: int):
        """Exact integral over the ball of radius *rho*."""
        rho = np.asarray(rho, dtype=float)
        return (self.amplitude * (math.sqrt(math.pi) * self.width) ** dim
                * sc.gammainc(dim / 2.0, (rho / self.width) ** 2))

    def scaled(self, factor: float) -> "GaussianDatum":
        return GaussianDatum(self.amplitude * factor, self.width)


@dataclass(frozen=True)
class IndicatorDatum:
    """``u0(x) = amplitude`` for ``|x| < radius``, else 0."""

    amplitude: float
    radius: float = 1.0

    def values(self, grid: Grid) -> np.ndarray:
        return np.where(grid.radius() < self.radius, self.amplitude, 0.0)

    def field(self, grid: Grid) -> Field:
        return Field(grid, self.values(grid))

    def ball_integral(self, rho, dim: int):
        rho = np.asarray(rho, dtype=float)
        return self.amplitude * ball_volume(dim) * np.minimum(rho, self.radius) ** dim

    def scaled(self, factor: float) -> "IndicatorDatum":
        return IndicatorDatum(self.amplitude * factor, self.radius)

# }}}


# {{{ mass functional


def mass_exponent(params: FractionalParams) -> float:
    """``alpha / (p - 1) - N alpha / (2 beta)``; negative exactly when ``p > p_f``."""
    if params.p <= 1.0:
        raise ValueError(f"the mass functional needs p > 1: got {params.p}")
    return params.alpha / (params.p - 1.0) - params.z_decay


def _ball_weights(grid: Grid, rho: float) -> np.ndarray:
    # cells straddling the sphere count by the fraction of a spacing inside,
    # which keeps the integral continuous in rho
    return np.clip((rho - grid.radius()) / grid.spacing + 0.5, 0.0, 1.0)


def ball_integral(u0, rho: float, dim: int | None = None) -> float:
    """Integral of *u0* over ``|x| < rho``.

    *u0* is a :class:`Field` (midpoint rule, error if the ball reaches
    ``0.9 L``) or a closed-form datum.
    """
    if isinstance(u0, Field):
        grid = u0.grid
        if rho > 0.9 * grid.half_width:
            raise BallExceedsBoxError(
                f"ball radius {rho:.6g} exceeds 0.9 * L = {0.9 * grid.half_width:.6g}")
        return float(np.sum(u0.values * _ball_weights(grid, rho)) * grid.cell_volume)
    if dim is None:
        raise ValueError("dim is required for closed-form data")
    return float(u0.ball_integral(rho, dim))


def _warn_negative(u0) -> None:
    if isinstance(u0, Field) and np.any(u0.values < 0):
        warnings.warn("the mass criteria assume nonnegative data", stacklevel=3)


def mass_functional(u0, R: float, params: FractionalParams) -> float:
    """``M(R) = R^{alpha/(p-1) - N alpha/(2 beta)} int_{|x| < R^{alpha/2beta}} u0``."""
    if not R > 0:
        raise ValueError(f"R must be positive: got {R}")
    _warn_negative(u0)
    return R ** mass_exponent(params) * ball_integral(u0, R**params.kappa, params.dim)


@dataclass
class MassReport:
    """Weighted mass over a radius grid.

    Attributes
    ----------
    radii, M_values : numpy.ndarray
        The log-spaced grid and ``M`` on it.
    sup_value, argmax_R : float
        Supremum after golden-section refinement around the grid maximum.
    tail_flag : bool
        True when ``M`` does not decay over the last decade of the grid,
        which for nonnegative data happens exactly when ``p <= p_f``.
    """

    radii: np.ndarray
    M_values: np.ndarray
    sup_value: float
    argmax_R: float
    tail_flag: bool

    def as_dict(self) -> dict:
        return {"R0": float(self.radii[0]), "R_max": float(self.radii[-1]),
                "sup_value": self.sup_value, "argmax_R": self.argmax_R,
                "tail_flag": self.tail_flag}


def _default_r_max(u0, params: FractionalParams) -> float:
    if isinstance(u0, Field):
        return (0.9 * u0.grid.half_width) ** (1.0 / params.kappa)
    return 1.0e3


def sup_mass(u0, R0: float, R_max: float | None, params: FractionalParams,
             n_radii: int = 200) -> MassReport:
    """Supremum of :func:`mass_functional` over ``[R0, R_max]``.

    A log-spaced grid of *n_radii* points locates the maximum, which is then
    refined by golden-section search between its grid neighbours.
    """
    if R_max is None:
        R_max = _default_r_max(u0, params)
    if not 0 < R0 < R_max:
        raise ValueError(f"need 0 < R0 < R_max: got R0={R0}, R_max={R_max}")
    radii = np.geomspace(R0, R_max, n_radii)
    values = np.array([mass_functional(u0, R, params) for R in radii])

    k = int(np.argmax(values))
    sup_value, argmax_R = float(values[k]), float(radii[k])
    lo, hi = radii[max(k - 1, 0)], radii[min(k + 1, n_radii - 1)]
    if hi > lo and values[k] > 0:
        res = optimize.minimize_scalar(
            lambda v: -mass_functional(u0, math.exp(v), params),
            bounds=(math.log(lo), math.log(hi)), method="bounded",
            options={"xatol": 1.0e-10})
        if -res.fun > sup_value:
            sup_value, argmax_R = float(-res.fun), float(math.exp(res.x))

    last_decade = radii >= R_max / 10.0
    tail = values[last_decade]
    tail_flag = bool(values.max() > 0 and (mass_exponent(params) >= 0
                                          or tail[-1] >= tail[0]))
    return MassReport(radii=radii, M_values=values, sup_value=sup_value,
                      argmax_R=argmax_R, tail_flag=tail_flag)

# }}}


# {{{ blow-up certificate


@dataclass(frozen=True)
class BlowupCertificate:
    """Smallest grid radius with ``M(R) > C``, if any.

    When present, every nonnegative solution with this datum blows up no
    later than ``time_bound = 4 R_star``.
    """

    R_star: float | None
    M_at_R_star: float | None
    threshold_C_used: float

    @property
    def present(self) -> bool:
        return self.R_star is not None

    @property
    def time_bound(self) -> float | None:
        return None if self.R_star is None else 4.0 * self.R_star

    def as_dict(self) -> dict:
        return {"R_star": self.R_star, "M_at_R_star": self.M_at_R_star,
                "threshold_C_used": self.threshold_C_used,
                "time_bound": self.time_bound}


def blowup_certificate(u0, threshold_C: float, params: FractionalParams, *,
                       R0: float = 1.0e-3, R_max: float | None = None,
                       n_radii: int = 200) -> BlowupCertificate:
    """Scan a log grid on ``[R0, R_max]`` for the first ``M(R) > threshold_C``."""
    if not threshold_C > 0:
        raise ValueError(f"threshold_C must be positive: got {threshold_C}")
    if R_max is None:
        R_max = _default_r_max(u0, params)
    for R in np.geomspace(R0, R_max, n_radii):
        value = mass_functional(u0, R, params)
        if value > threshold_C:
            return BlowupCertificate(float(R), float(value), float(threshold_C))
    return BlowupCertificate(None, None, float(threshold_C))


def a_functional(u0, T: float, params: FractionalParams) -> float:
    """``A(T) = T^{alpha/(p-1) - N alpha/(2 beta)} int_{|y| < (T/4)^{alpha/2beta}} u0``.

    Satisfies ``A(4 R) = 4^{alpha/(p-1) - N alpha/(2 beta)} M(R)``.
    """
    if not T > 0:
        raise ValueError(f"T must be positive: got {T}")
    _warn_negative(u0)
    return T ** mass_exponent(params) * ball_integral(u0, (T / 4.0) ** params.kappa,
                                                      params.dim)

# }}}


# {{{ cone functional


@dataclass
class SnapshotHistory:
    """Field snapshots ``(t_k, u(., t_k))`` on a common grid."""

    grid: Grid
    params: FractionalParams
    snapshots: list = field(default_factory=list)

    @classmethod
    def from_state(cls, state) -> "SnapshotHistory":
        """Wrap the snapshots stored by a solver state."""
        return cls(grid=state.grid, params=state.params, snapshots=list(state.snapshots))


def j_functional(run, T: float, b_cone: float, profile_G: RadialProfile) -> float:
    """Discrete ``J(T; b) = int_0^T int u(x, t) Y_b(x, T - t) dx dt``.

    Here ``Y_b(x, tau) = 1{|x| < tau^{alpha/2beta}} tau^{p alpha/(p-1) - 1} G(b)``.
    The field is held constant on each snapshot interval; the time integral
    of the cone-truncated weight is then exact at every grid point.

    Parameters
    ----------
    run : SnapshotHistory or solver state
        Anything with ``grid``, ``params`` and ``snapshots``; snapshots must
        start at ``t = 0`` and reach ``T``.
    b_cone : float
        Cone parameter, at least ``2^{alpha/2beta + 1}``.
    """
    params = run.params
    kappa = params.kappa
    if b_cone < 2.0 ** (kappa + 1.0):
        raise ValueError(f"b_cone must be >= 2^(alpha/2beta + 1) = "
                         f"{2.0 ** (kappa + 1.0):.6g}: got {b_cone}")
    if profile_G.kind != "G":
        raise ValueError("profile_G must be a G profile")
    snaps = sorted(run.snapshots, key=lambda s: s[0])
    if not snaps or snaps[0][0] != 0.0 or snaps[-1][0] < T:
        span = (snaps[0][0], snaps[-1][0]) if snaps else None
        raise InsufficientSnapshotsError(
            f"snapshots must cover [0, {T}]: have {span}")
    if T ** kappa > run.grid.half_width:
        raise BallExceedsBoxError(f"cone radius T^(alpha/2beta) = {T**kappa:.6g} "
                                  f"exceeds L = {run.grid.half_width}")

    e = params.p * params.alpha / (params.p - 1.0)
    # a point at distance |x| is inside the cone while T - t > |x|^{1/kappa}
    entry = run.grid.radius() ** (1.0 / kappa)
    total = 0.0
    for (t_lo, u), (t_hi, _) in zip(snaps[:-1], snaps[1:]):
        if t_lo >= T:
            break
        tau_hi = T - t_lo
        tau_lo = np.maximum(T - min(t_hi, T), entry)
        weight = np.where(tau_hi > tau_lo, (tau_hi**e - tau_lo**e) / e, 0.0)
        total += float(np.sum(u * weight))
    g_bar = float(profile_G(b_cone))
    return g_bar * total * run.grid.cell_volume

# }}}


# {{{ calibration


def calibration_key(params: FractionalParams) -> str:
    return f"N={params.dim},alpha={params.alpha:g},beta={params.beta:g},p={params.p:g}"


def _calibration_path() -> Path:
    return Path(str(resources.files("fracfujita") / "data" / "calibration.json"))


def load_calibration(path=None) -> dict:
    """Read the calibration file (the packaged one by default)."""
    path = Path(path) if path is not None else _calibration_path()
    with open(path) as inf:
        return json.load(inf)


def calibration_hash(path=None) -> str:
    """SHA-256 of the calibration file bytes."""
    path = Path(path) if path is not None else _calibration_path()
    return hashlib.sha256(path.read_bytes()).hexdigest()

# }}}

# vim: foldmethod=marker
