"""
Evaluating the Mittag-Leffler function
======================================

``E_{a,b}(z)`` for real ``z <= 0`` is the building block of every kernel and
time step in the package. Three branches (series, real-axis integral,
asymptotic expansion) are stitched together; this demo checks them against
the two classical closed forms and times a vectorised call.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.special import erfcx, gamma

from fracfujita.special_functions import MLParams, ml_eval, ml_weight, mittag_leffler

# a = 1/2: E_{1/2,1}(-x) = exp(x^2) erfc(x), which is erfcx(x)
x = np.geomspace(1e-3, 1e6, 10)
values = mittag_leffler(-x, 0.5, 1.0)
print("E_{1/2}(-x) vs erfcx(x):")
for xi, v in zip(x, values):
    print(f"  x={xi:10.3g}  E={v:.16e}  rel.err={abs(v / erfcx(xi) - 1):.1e}")

# a = 1: the exponential
print("E_{1,1}(-2) - exp(-2) =", ml_eval(MLParams(1.0, 1.0), -2.0) - np.exp(-2.0))

# the integrated kernel used as a time-stepping weight
print("W(lambda=0, a=0.5, tau=1) =", float(ml_weight(0.0, 0.5, 1.0)),
      "vs 1/Gamma(3/2) =", 1 / gamma(1.5))

z = -np.geomspace(1e-4, 1e8, 200_000)
start = time.perf_counter()
mittag_leffler(z, 0.3, 1.3)
print(f"200k evaluations at a=0.3, b=1.3 in {time.perf_counter() - start:.2f} s")
