"""Numerics for the time- and space-fractional Fujita problem

.. math::

    \\partial_t^\\alpha u + (-\\Delta)^\\beta u = |u|^{p-1} u.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .special_functions import MLParams, mittag_leffler, ml_eval, ml_weight
from .kernels import (
    FractionalParams, RadialProfile, build_profile, eval_Y, eval_Z, lr_norm,
    verify_estimates)
from .spectral_solver import (
    BLOWUP, GLOBAL, INCONCLUSIVE, Field, Grid, SimulationOutcome, SpectralHistory,
    continue_run, linear_evolve, lq_norm, picard_iterate, picard_time, run, solve, step)
from .criteria import (
    BlowupCertificate, ExponentReport, GaussianDatum, IndicatorDatum, MassReport,
    RangeClass, a_functional, blowup_certificate, classify_q, exponents, j_functional,
    mass_functional, sup_mass)

__all__ = [
    "__version__",
    "MLParams", "mittag_leffler", "ml_eval", "ml_weight",
    "FractionalParams", "RadialProfile", "build_profile", "eval_Y", "eval_Z", "lr_norm",
    "verify_estimates",
    "BLOWUP", "GLOBAL", "INCONCLUSIVE", "Field", "Grid", "SimulationOutcome",
    "SpectralHistory", "continue_run", "linear_evolve", "lq_norm", "picard_iterate",
    "picard_time", "run", "solve", "step",
    "BlowupCertificate", "ExponentReport", "GaussianDatum", "IndicatorDatum",
    "MassReport", "RangeClass", "a_functional", "blowup_certificate", "classify_q",
    "exponents", "j_functional", "mass_functional", "sup_mass",
]
