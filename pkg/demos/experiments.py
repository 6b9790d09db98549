"""
Phase diagram, decay rate and convergence
=========================================

Multi-run studies: the global/blow-up flip in amplitude above the Fujita
exponent, the measured ``L^q`` decay of a global run, and the observed
order of the time stepper.
"""

from __future__ import annotations

import math
from dataclasses import replace

from fracfujita.cli_io import SimulationConfig
from fracfujita.criteria import GaussianDatum, exponents
from fracfujita.experiments import convergence_study, decay_rate, phase_diagram
from fracfujita.kernels import FractionalParams
from fracfujita.spectral_solver import Grid, solve

params = FractionalParams(alpha=0.5, beta=0.25, p=2.0, dim=1)
config = SimulationConfig(params=params, grid=Grid(1, 32.0, 128), dt=0.05, T_max=50.0,
                          q_list=(1.0, 3.0, math.inf), datum=GaussianDatum(1.0))

table = phase_diagram(config, [1.2, 2.0], [0.1, 1.0, 3.0], workers=2)
print(table.to_csv())
print("critical amplitudes:", table.critical)

out = solve(config.with_datum(GaussianDatum(0.3)))
slope = decay_rate(out, 3.0, (10.0, 50.0))
print(f"q=3 slope on [10, 50]: {slope:.3f} (long-time prediction -b(3) = "
      f"{-exponents(params).b_decay(3):.3f})")

study = convergence_study(replace(config, T_max=4.0, datum=GaussianDatum(0.5)),
                          [0.1, 0.05, 0.025, 0.005])
print(study.to_csv())
