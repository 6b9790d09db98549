"""Two-parameter Mittag-Leffler function on the negative real axis.

The function

.. math::

    E_{a,b}(z) = \\sum_{k \\ge 0} \\frac{z^k}{\\Gamma(a k + b)}

is evaluated for real ``z <= 0``, ``0 < a <= 1`` and ``0 < b <= 2`` with
three regimes:

* a truncated Taylor series close to the origin,
* a real-axis Laplace-type integral representation in the middle band,
  discretised with double-exponential quadrature,
* the algebraic asymptotic expansion for large ``|z|``.

The switch point to the asymptotic expansion and its number of terms are
read from a calibration table generated by ``tools/calibrate_ml.py``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from ._ml_table import A_GRID, N_TERMS, Z_ASYM

__all__ = [
    "MLParams",
    "ml_eval",
    "mittag_leffler",
    "ml_weight",
    "asymptotic_switch",
]

#: Taylor series is used for ``|z| <= SERIES_RADIUS``; for ``b > 1`` it is
#: used up to ``|z| < 1`` since the downward recurrence in ``b`` divides by ``z``.
SERIES_RADIUS = 0.5

#: Largest split point of the integral representation.
_SPLIT_MAX = 50.0
_SPLIT_MIN = 0.5

_CHUNK = 4096

#: Orders with ``1 - a`` below this use the pole-subtracted integral.
_NEAR_ONE = 1.0e-2


# {{{ quadrature nodes


def _de_rules(h: float = 1.0 / 16.0):
    """Tanh-sinh rule on (0, 1) and exp-sinh rule on (0, inf).

    Both rules are returned in a form that keeps the abscissae in log space,
    so that nodes clustered at the endpoints never underflow.
    """
    t = np.arange(-6.0, 6.0 + h / 2, h)
    u = np.pi * np.sinh(t)
    # logistic form of (1 + tanh(u/2)) / 2 and its complement
    log_rho = -np.logaddexp(0.0, -u)
    rho = np.exp(log_rho)
    one_m = np.exp(-np.logaddexp(0.0, u))
    w_rho = h * np.pi * np.cosh(t) * rho * one_m

    te = np.arange(-5.0, 4.0 + h / 2, h)
    v = 0.5 * np.pi * np.sinh(te)
    excess = np.exp(v)
    w_exc = h * 0.5 * np.pi * np.cosh(te) * excess

    return log_rho, w_rho, excess, w_exc


_LOG_RHO, _W_RHO, _EXCESS, _W_EXC = _de_rules()
_LOG1P_EXCESS = np.log1p(_EXCESS)

# }}}


# {{{ parameters


@dataclass(frozen=True)
class MLParams:
    """Parameters of :math:`E_{a,b}`.

    Parameters
    ----------
    a : float
        Order, ``0 < a <= 1``.
    b : float
        Second parameter, ``0 < b <= 2``.
    """

    a: float
    b: float = 1.0

    def __post_init__(self) -> None:
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and 0.0 < a <= 1.0):
            raise ValueError(f"'a' must be in (0, 1]: got {self.a!r}")
        if not (math.isfinite(b) and 0.0 < b <= 2.0):
            raise ValueError(f"'b' must be in (0, 2]: got {self.b!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

# }}}


# {{{ branches


def asymptotic_switch(a: float) -> tuple[float, int]:
    """Return ``(x_min, n_terms)`` of the asymptotic branch for order *a*.

    Between two calibrated orders the more conservative neighbour is used.
    """
    i = int(np.searchsorted(A_GRID, a))
    if i < len(A_GRID) and A_GRID[i] == a:
        return float(Z_ASYM[i]), int(N_TERMS[i])

    lo = max(i - 1, 0)
    hi = min(i, len(A_GRID) - 1)
    j = lo if Z_ASYM[lo] >= Z_ASYM[hi] else hi
    return float(Z_ASYM[j]), int(N_TERMS[j])


def _series_coefficients(a: float, b: float, xmax: float) -> np.ndarray:
    k = np.arange(4096)
    coeff = sc.rgamma(a * k + b)
    with np.errstate(divide="ignore"):
        log_term = np.log(np.abs(coeff)) + k * math.log(max(xmax, 1.0e-300))
    (significant,) = np.nonzero(log_term > math.log(1.0e-18))
    nterms = significant[-1] + 2 if significant.size else 1
    return coeff[:nterms]


def _series(a: float, b: float, x: np.ndarray) -> np.ndarray:
    coeff = _series_coefficients(a, b, float(x.max()))
    # Horner in -x
    result = np.zeros_like(x)
    for c in coeff[::-1]:
        result = result * (-x) + c
    return result


def _split_integer(b: float) -> tuple[int, float]:
    """``b = m + f`` with integer ``m`` and ``|f| <= 1/2``, exact for ``b`` in (0, 2]."""
    m = round(b)
    return m, b - m


def _pi_phase(b: float) -> tuple[float, float]:
    """``(sin(b pi), cos(b pi))`` without the rounding of ``b pi``."""
    m, f = _split_integer(b)
    sign = -1.0 if m % 2 else 1.0
    return sign * math.sin(math.pi * f), sign * math.cos(math.pi * f)


def _rgamma_shifted(a: float, b: float, k: np.ndarray) -> np.ndarray:
    """``1 / Gamma(b - a k)``, accurate near the poles when ``a`` is near one.

    With ``b = m + f`` and ``d = 1 - a`` (both exact for ``a >= 1/2``),
    ``b - a k = (m - k) + (f + k d)``; near a pole the reflection formula
    is applied to the small offset ``f + k d`` directly.
    """
    if a < 0.5:
        return sc.rgamma(b - a * k)
    m, f = _split_integer(b)
    n = m - k
    eps = f + k * (1.0 - a)
    near = (n <= 0) & (np.abs(eps) < 0.5)
    out = sc.rgamma(n + eps)
    # 1/Gamma(n + eps) = (-1)^n Gamma(1 - n - eps) sin(pi eps) / pi
    n, eps = n[near], eps[near]
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    out[near] = sign * sc.gamma(1 - n - eps) * np.sin(math.pi * eps) / math.pi
    return out


def _asymptotic(a: float, b: float, x: np.ndarray, nterms: int) -> np.ndarray:
    # E(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(b - a k)
    k = np.arange(1, nterms + 1)
    coeff = (-1.0) ** (k + 1) * _rgamma_shifted(a, b, k)
    xinv = 1.0 / x
    result = np.zeros_like(x)
    for c in coeff[::-1]:
        result = (result + c) * xinv
    return result


def _integral(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Laplace-type representation, valid for ``0 < a < 1`` and ``b <= 1``.

    .. math::

        E_{a,b}(-x) = \\frac{1}{\\pi} \\int_0^\\infty e^{-r} r^{a-b}
            \\frac{r^a \\sin(b\\pi) + x \\sin((b-a)\\pi)}
                  {r^{2a} + 2 x r^a \\cos(a\\pi) + x^2} \\, dr.

    The integral is split at ``r0 ~ x^(1/a)``, where the denominator comes
    closest to vanishing when ``a`` is near one. On ``(0, r0)`` the
    substitution ``r = s^(1/g)``, ``g = 1 + a - b`` removes the power
    singularity before a tanh-sinh rule is applied; ``(r0, inf)`` uses an
    exp-sinh rule.
    """
    sb = math.sin(b * math.pi)
    sba = math.sin((b - a) * math.pi)
    ca = math.cos(a * math.pi)
    g = 1.0 + a - b

    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for start in range(0, x.size, _CHUNK):
        xc = x[start:start + _CHUNK, None]
        log_r0 = np.clip(np.log(xc) / a, math.log(_SPLIT_MIN), math.log(_SPLIT_MAX))
        r0 = np.exp(log_r0)

        # (0, r0): substituted variable s in (0, r0^g)
        log_r = log_r0 + _LOG_RHO / g
        r = np.exp(log_r)
        ra = np.exp(a * log_r)
        num = ra * sb + xc * sba
        den = ra * (ra + 2.0 * xc * ca) + xc * xc
        left = (np.exp(-r) * num / den) @ _W_RHO
        left *= np.exp(g * log_r0[:, 0]) / g

        # (r0, inf)
        log_r = log_r0 + _LOG1P_EXCESS
        r = np.exp(log_r)
        ra = np.exp(a * log_r)
        num = ra * sb + xc * sba
        den = ra * (ra + 2.0 * xc * ca) + xc * xc
        right = (np.exp((a - b) * log_r - r) * num / den) @ _W_EXC
        right *= r0[:, 0]

        out[start:start + _CHUNK] = (left + right) / math.pi

    return out


def _gauss_panels(edges: np.ndarray):
    xg, wg = np.polynomial.legendre.leggauss(20)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return (mid[:, None] + half[:, None] * xg).ravel(), (half[:, None] * wg).ravel()


# graded towards 0, the window around the near-pole at y = 1, and the tail
_NEAR_LOW = _gauss_panels(np.concatenate([[0.0], 0.5 * 2.0 ** -np.arange(60.0, -1.0, -1.0)]))
_NEAR_WINDOW = _gauss_panels(np.linspace(0.5, 1.5, 5))
_NEAR_TAIL = _gauss_panels(1.5 * 2.0 ** np.arange(0.0, 14.0))


def _integral_near_one(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Integral representation for ``a`` close to one and ``b <= 1``.

    With ``y = r^a / x``, ``s = x^(1/a)`` and ``g(y) = exp(-s y^(1/a)) y^c``,
    ``c = (1 - b) / a``,

    .. math::

        E_{a,b}(-x) = \\frac{x^c}{a\\pi} \\operatorname{Im}\\Big[e^{ib\\pi}
            \\int_0^\\infty \\frac{g(y)}{y - y_p} \\, dy\\Big],
        \\qquad y_p = e^{-i\\pi(1 - a)}.

    The pole ``y_p`` approaches the real axis as ``a -> 1``; on the window
    ``(1/2, 3/2)`` its contribution ``g(y_p) log((3/2 - y_p) / (1/2 - y_p))``
    is taken analytically, leaving a smooth difference quotient.
    """
    d = 1.0 - a
    c = (1.0 - b) / a
    yp = complex(math.cos(math.pi * d), -math.sin(math.pi * d))
    sin_b, cos_b = _pi_phase(b)
    theta = math.pi * d / a
    log_window = np.log(1.5 - yp) - np.log(0.5 - yp)

    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for start in range(0, x.size, _CHUNK // 16):
        xc = x[start:start + _CHUNK // 16]
        s = xc[:, None] ** (1.0 / a)

        def g(y):
            with np.errstate(divide="ignore"):
                return np.exp(-s * y ** (1.0 / a)) * y**c

        # g continued to y_p, principal branch
        gp = np.exp(-s[:, 0] * math.cos(theta)
                    + 1j * (s[:, 0] * math.sin(theta) - math.pi * d * c))
        total = np.zeros(xc.shape, dtype=complex)
        for y, w in (_NEAR_LOW, _NEAR_TAIL):
            total += (g(y) / (y - yp)) @ w
        y, w = _NEAR_WINDOW
        total += ((g(y) - gp[:, None]) / (y - yp)) @ w
        total += gp * log_window
        out[start:start + xc.size] = (xc**c / (a * math.pi)
                                      * (sin_b * total.real + cos_b * total.imag))
    return out


def _middle(a: float, b: float, x: np.ndarray) -> np.ndarray:
    if b > 1.0:
        # E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z, with z = -x
        return (sc.rgamma(b - a) - _middle(a, b - a, x)) / x
    if 1.0 - a < _NEAR_ONE:
        return _integral_near_one(a, b, x)
    return _integral(a, b, x)


def _unit_order(b: float, z: np.ndarray) -> np.ndarray:
    if b == 1.0:
        return np.exp(z)
    return sc.hyp1f1(1.0, b, z) * sc.rgamma(b)

# }}}


# {{{ public interface


def mittag_leffler(z, a: float, b: float = 1.0) -> np.ndarray:
    """Evaluate :math:`E_{a,b}(z)` elementwise for real ``z <= 0``.

    Parameters
    ----------
    z : array_like
        Nonpositive real arguments.
    a, b : float
        Parameters, see :class:`MLParams`.

    Returns
    -------
    numpy.ndarray
        Array of the same shape as *z* (a 0-d array for scalar input).
    """
    params = MLParams(a, b)
    a, b = params.a, params.b

    z = np.asarray(z, dtype=np.float64)
    if np.any(z > 0) or np.any(np.isnan(z)):
        raise ValueError("arguments must be nonpositive real numbers")

    if a == 1.0:
        return _unit_order(b, z)

    x = -z.ravel()
    out = np.empty_like(x)

    x_asym, nterms = asymptotic_switch(a)
    if 1.0 - a < _NEAR_ONE:
        # the expansion omits a transition term of size about exp(-x), which
        # must stay far below the algebraic part (1 - a)/x
        x_asym = max(x_asym, 40.0 + math.log(1.0 / (1.0 - a)))
    small = x <= SERIES_RADIUS
    if b > 1.0:
        small |= x < 1.0
    large = x >= x_asym
    mid = ~(small | large)

    if small.any():
        out[small] = _series(a, b, x[small])
    if large.any():
        out[large] = _asymptotic(a, b, x[large], nterms)
    if mid.any():
        out[mid] = _middle(a, b, x[mid])

    # +inf arguments
    out[np.isinf(x)] = 0.0

    return out.reshape(z.shape)


def ml_eval(params: MLParams, z: float) -> float:
    """Scalar :math:`E_{a,b}(z)` for ``z <= 0``.

    Examples
    --------
    >>> ml_eval(MLParams(1.0, 1.0), -1.0)  # doctest: +ELLIPSIS
    0.367879441...
    """
    return float(mittag_leffler(z, params.a, params.b))


def ml_weight(lam, a: float, tau) -> np.ndarray:
    """Integral of the time-stepping kernel,

    .. math::

        W(\\lambda, a, \\tau) = \\int_0^\\tau s^{a-1} E_{a,a}(-\\lambda s^a) \\, ds
            = \\frac{1 - E_{a,1}(-\\lambda \\tau^a)}{\\lambda}.

    It is evaluated as :math:`\\tau^a E_{a,1+a}(-\\lambda\\tau^a)`, which
    has no cancellation and reduces to :math:`\\tau^a / \\Gamma(1 + a)` at
    :math:`\\lambda = 0`.

    Parameters
    ----------
    lam : array_like
        Nonnegative rates.
    a : float
        Order in ``(0, 1]``.
    tau : array_like
        Positive interval lengths; broadcast against *lam*.
    """
    lam = np.asarray(lam, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    if np.any(tau <= 0):
        raise ValueError("'tau' must be positive")
    if np.any(lam < 0):
        raise ValueError("'lam' must be nonnegative")

    lam, tau = np.broadcast_arrays(lam, tau)
    ta = tau ** a
    return ta * mittag_leffler(-lam * ta, a, 1.0 + a)

# }}}

# vim: foldmethod=marker
