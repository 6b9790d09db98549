"""Freeze high-precision reference values of the Mittag-Leffler function.

Two independent oracles are used:

* the defining power series summed in arbitrary precision, with the working
  precision raised until the largest term is resolved (``--series``);
* numerical inversion of the Laplace transform ``s^(a-b) / (s^a + x)`` with
  Talbot's contour for large arguments, where the series is impractical.

Usage::

    python tools/make_ml_fixture.py tests/data/ml_oracle.json
    python tools/make_ml_fixture.py --near-one tests/data/ml_near_one.json

The second form covers orders within 1e-2 of one, across every branch of
the evaluator, with Talbot inversion throughout.
"""

from __future__ import annotations

import argparse
import json
import time

import mpmath as mp

ORDERS = [0.3, 0.5, 0.8]
SERIES_Z = [0.0, -0.25, -0.5, -1.0, -2.0, -3.0, -5.0, -7.0, -10.0]
ASYMPTOTIC_Z = [-1.0e3, -3.0e3, -1.0e4, -1.0e5, -1.0e6, -1.0e7, -1.0e8]

NEAR_ONE_D = [5.0e-3, 1.0e-5, 1.0e-10, 2.0**-53]
NEAR_ONE_Z = [-0.3, -0.6, -2.0, -8.0, -30.0, -60.0, -90.0, -1.0e3]


def series_value(a, b, z, min_terms=300):
    """Sum the power series with enough digits to survive cancellation."""
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(z)

    # locate the peak term at modest precision to size the working precision
    with mp.workdps(30):
        k, peak = 0, mp.mpf(0)
        while True:
            term = abs(z) ** k * mp.rgamma(a * k + b) if z != 0 else (1 if k == 0 else 0)
            peak = max(peak, term)
            if k > min_terms and term < mp.mpf(10) ** -40:
                break
            k += 1
        nterms = k
        digits = int(mp.log10(peak + 1)) if peak > 1 else 0

    with mp.workdps(digits + 40):
        total = mp.mpf(0)
        for k in range(nterms + 1):
            total += z**k * mp.rgamma(a * k + b)
        return mp.mpf(total), nterms


def talbot_value(a, b, z):
    with mp.workdps(40):
        a, b, x = mp.mpf(a), mp.mpf(b), -mp.mpf(z)
        return mp.invertlaplace(lambda s: s ** (a - b) / (s**a + x), 1, method="talbot")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outfile")
    parser.add_argument("--near-one", action="store_true")
    args = parser.parse_args()

    if args.near_one:
        records = []
        for d in NEAR_ONE_D:
            a = 1.0 - d
            for b in [a, 1.0, 0.5, 1.0 + a]:
                for z in NEAR_ONE_Z:
                    records.append({"a": a, "b": b, "z": z, "oracle": "talbot",
                                    "value": mp.nstr(talbot_value(a, b, z), 25)})
        with open(args.outfile, "w") as outf:
            json.dump({"records": records}, outf, indent=1)
        return

    records = []
    for a in ORDERS:
        for b in [a, 1.0, 1.0 + a]:
            for z in SERIES_Z:
                t0 = time.time()
                value, nterms = series_value(a, b, z)
                records.append({
                    "a": a, "b": b, "z": z, "value": mp.nstr(value, 25),
                    "oracle": "series", "terms": nterms,
                })
                print(f"series a={a} b={b:.2f} z={z:g} terms={nterms} "
                      f"({time.time() - t0:.1f}s)", flush=True)

            for z in ASYMPTOTIC_Z:
                value = talbot_value(a, b, z)
                records.append({
                    "a": a, "b": b, "z": z, "value": mp.nstr(value, 25),
                    "oracle": "talbot",
                })

    with open(args.outfile, "w") as outf:
        json.dump({"records": records}, outf, indent=1)


if __name__ == "__main__":
    main()
