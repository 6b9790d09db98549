"""
Self-similar kernels Z and Y
============================

The solution kernel ``Z(x, t) = t^{-N kappa} F(|x| t^{-kappa})`` and the
forcing kernel ``Y`` are tabulated once per ``(alpha, beta, N)`` as radial
profiles. The demo builds both profiles, checks mass conservation and the
self-similar collapse, and prints the near-origin and far-field behaviour.
"""

from __future__ import annotations

import math

import numpy as np

from fracfujita.kernels import FractionalParams, build_profile, eval_Z, lr_norm

params = FractionalParams(alpha=0.5, beta=0.5, p=2.0, dim=3)
F = build_profile("F", params)
G = build_profile("G", params)
print(f"F tabulated on [{F.r_min:.1e}, {F.r_max:.1e}], quadrature error {F.quadrature_error:.1e}")

for t in (0.5, 1.0, 2.0):
    print(f"  t={t}: ||Z||_1 - 1 = {lr_norm(F, 1.0, t) - 1:.1e}")
print(f"||Y(., 1)||_1 = {lr_norm(G, 1.0, 1.0):.8f}, 1/Gamma(alpha) = {1 / math.gamma(0.5):.8f}")

r = np.geomspace(0.01, 10.0, 5)
for t in (0.5, 2.0):
    collapsed = t ** params.z_decay * eval_Z(r * t ** params.kappa, t, F)
    print(f"  t={t}: t^(N kappa) Z(r t^kappa, t) =", np.array2string(collapsed, precision=6))
print("  F(r)                        =", np.array2string(F(r), precision=6))

# F ~ r^{2 beta - N} at the origin and ~ r^{-(N + 2 beta)} far away
print("F head exponent", F.head_exponent, " tail slope",
      np.log(F(100.0) / F(50.0)) / np.log(2.0))
