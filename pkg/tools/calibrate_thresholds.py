"""Generate ``src/fracfujita/data/calibration.json``.

For each parameter set the solver is run on Gaussian data at a list of
training amplitudes. With ``T`` the detected blow-up time (``T_max`` for
global runs), a certificate ``M(R) > C`` claiming blow-up by ``4 R`` is
contradicted by that run whenever ``4 R < T``. The smallest threshold
consistent with all training runs is therefore

    C_min = max over runs of  max_{R <= T / 4} M(R),

and the shipped threshold is ``C = 2 C_min``. The global-existence side
records ``delta``, the supremum of ``M`` for the largest training amplitude
that stayed global, together with the bisected critical amplitude.

The Picard constant is the fitted ``||Y(., 1)||_1`` from the tabulated
forcing-kernel profile.

Usage::

    python tools/calibrate_thresholds.py src/fracfujita/data/calibration.json
"""

from __future__ import annotations

import argparse
import json
import math
import time

from fracfujita.criteria import GaussianDatum, calibration_key, exponents, sup_mass
from fracfujita.experiments import bisect_critical_amplitude
from fracfujita.kernels import FractionalParams, build_profile, lr_norm
from fracfujita.spectral_solver import BLOWUP, Grid, run
from fracfujita.cli_io import SimulationConfig

MARGIN = 2.0
RUN = {"L": 64.0, "n": 256, "dt": 0.02, "T_max": 200.0, "width": 1.0}
TRAINING = {
    # (alpha, beta, p, dim): amplitudes
    (0.5, 0.25, 2.0, 1): [0.4, 0.6, 0.8, 1.0, 1.4, 2.0, 4.0],
    (0.5, 0.25, 1.2, 1): [0.03, 0.3, 3.0],
}


def calibrate(params: FractionalParams, amplitudes) -> dict:
    grid = Grid(params.dim, RUN["L"], RUN["n"])
    training = []
    for a in amplitudes:
        datum = GaussianDatum(a, RUN["width"])
        t0 = time.time()
        outcome = run(datum.field(grid), params, RUN["dt"], RUN["T_max"])
        horizon = outcome.t_detect if outcome.signal == BLOWUP else RUN["T_max"]
        report = sup_mass(datum, 1.0e-3, horizon / 4.0, params)
        training.append({"amplitude": a, "signal": outcome.signal,
                         "t_detect": outcome.t_detect, "R_limit": horizon / 4.0,
                         "M_max": report.sup_value})
        print(f"  a={a:<6g} {outcome.signal:<15} t_detect={outcome.t_detect} "
              f"M_max={report.sup_value:.6g} ({time.time() - t0:.1f}s)", flush=True)

    C_min = max(row["M_max"] for row in training)
    entry = {"C": MARGIN * C_min, "C_min": C_min, "margin": MARGIN,
             "training": training, "run": RUN}

    globals_ = [r["amplitude"] for r in training if r["signal"] != BLOWUP]
    blowups = [r["amplitude"] for r in training if r["signal"] == BLOWUP]
    if params.p >= exponents(params).p_f and globals_ and blowups:
        a_glob = max(globals_)
        entry["delta"] = sup_mass(GaussianDatum(a_glob, RUN["width"]), 1.0e-3, 1.0e3,
                                  params).sup_value
        low = a_glob
        high = min(a for a in blowups if a > low)
        config = SimulationConfig(params=params, grid=grid, dt=RUN["dt"],
                                  T_max=RUN["T_max"], q_list=(math.inf,),
                                  datum=GaussianDatum(1.0, RUN["width"]),
                                  refine_detection=False)
        low, high = bisect_critical_amplitude(config, low, high)
        entry["critical_bracket"] = [low, high]
        entry["critical_amplitude"] = math.sqrt(low * high)
        entry["gap_C_over_delta"] = entry["C"] / entry["delta"]

    profile_G = build_profile("G", params)
    entry["picard_K"] = lr_norm(profile_G, 1.0, 1.0)
    return entry


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outfile")
    args = parser.parse_args()

    entries = {}
    for (alpha, beta, p, dim), amplitudes in TRAINING.items():
        params = FractionalParams(alpha, beta, p, dim)
        print(calibration_key(params), flush=True)
        entries[calibration_key(params)] = calibrate(params, amplitudes)

    with open(args.outfile, "w") as outf:
        json.dump({"format": 1, "entries": entries}, outf, indent=1, sort_keys=True)
        outf.write("\n")


if __name__ == "__main__":
    main()
