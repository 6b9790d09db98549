"""Asymptotic-branch calibration for the Mittag-Leffler function.

Generated by tools/calibrate_ml.py; do not edit by hand.
Relative tolerance 1e-13, Talbot-inversion reference.
"""

import numpy as np

A_GRID = np.array([
    0.02,
    0.05,
    0.1,
    0.15,
    0.2,
    0.25,
    0.3,
    0.35,
    0.4,
    0.45,
    0.5,
    0.55,
    0.6,
    0.65,
    0.7,
    0.75,
    0.8,
    0.85,
    0.9,
    0.93,
    0.95,
    0.97,
    0.98,
    0.99,
    0.995,
    0.999,
])

Z_ASYM = np.array([
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    10.0,
    13.336,
    13.336,
    17.783,
    17.783,
    23.714,
    31.623,
    31.623,
    31.623,
    42.17,
    42.17,
    42.17,
    42.17,
    56.235,
])

N_TERMS = np.array([
    16,
    15,
    15,
    15,
    15,
    16,
    16,
    17,
    18,
    20,
    22,
    24,
    29,
    25,
    32,
    26,
    38,
    25,
    24,
    26,
    33,
    23,
    26,
    29,
    36,
    19,
])
