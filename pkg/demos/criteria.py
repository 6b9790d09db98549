"""
Exponents, weighted mass and blow-up certificates
=================================================

Which ``L^q`` spaces are well posed, how fast small solutions decay, and
whether a datum is large enough to force blow-up are all read off closed
exponents and the weighted mass ``M(R)`` of the initial datum.
"""

from __future__ import annotations

import math

from fracfujita.criteria import (
    GaussianDatum, IndicatorDatum, blowup_certificate, calibration_key, classify_q,
    exponents, load_calibration, sup_mass)
from fracfujita.kernels import FractionalParams

params = FractionalParams(alpha=0.5, beta=0.25, p=2.0, dim=1)
rep = exponents(params)
print(f"ell={rep.ell}, p_f={rep.p_f}, p_c={rep.p_c}, b(3)={rep.b_decay(3):.4f}")
for q in (2, 3, 4, 8, math.inf):
    print(f"  q={q}: {classify_q(q, params).tag}")

# M(R) = R^{-1/2} min(2, 2R) for the unit indicator; its supremum is 2 at R = 1
report = sup_mass(IndicatorDatum(1.0, 1.0), 0.5, 1e3, params)
print(f"indicator: sup M = {report.sup_value:.6f} at R = {report.argmax_R:.4f}")

# below the Fujita exponent M(R) grows without bound
sub = FractionalParams(alpha=0.5, beta=0.25, p=1.2, dim=1)
print("p=1.2 tail flag:", sup_mass(GaussianDatum(0.01), 1e-3, 1e3, sub).tail_flag)

C = load_calibration()["entries"][calibration_key(params)]["C"]
for amplitude in (1.0, 4.0, 16.0):
    cert = blowup_certificate(GaussianDatum(amplitude), C, params, R_max=1e3)
    bound = f"blow-up by t = {cert.time_bound:.3g}" if cert.present else "no certificate"
    print(f"Gaussian amplitude {amplitude} against C = {C:.3g}: {bound}")
