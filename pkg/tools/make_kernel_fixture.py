"""Freeze reference values of the kernel profiles ``F`` and ``G``.

The oracle avoids Fourier inversion altogether. Subordination writes the
symbols as Laplace transforms of the Wright function ``M_a``,

    E_a(-x)       = int_0^inf M_a(s) exp(-x s) ds,
    E_{a,a}(-x)   = a int_0^inf s M_a(s) exp(-x s) ds,

so for ``beta`` in {1/2, 1}, where the kernel of ``exp(-s (-Lap)^beta)`` is
the Poisson or heat kernel, each profile value is a smooth integral over
``s``, evaluated with mpmath.

Usage::

    python tools/make_kernel_fixture.py tests/data/kernel_oracle.json
"""

from __future__ import annotations

import argparse
import functools
import json

import mpmath as mp

CASES = [
    # (alpha, beta, dim)
    (0.5, 0.5, 1),
    (0.5, 0.5, 3),
    (0.3, 0.5, 3),
    (0.7, 0.5, 2),
    (0.5, 1.0, 1),
    (0.3, 1.0, 3),
]
RADII = [0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 30.0]


@functools.lru_cache(maxsize=None)
def wright_m(a, s):
    """``M_a(s) = sum_n (-s)^n / (n! Gamma(1 - a - a n))``."""
    if a == mp.mpf(1) / 2:
        return mp.exp(-(s**2) / 4) / mp.sqrt(mp.pi)
    # the terms peak near n = s^{1/(1-a)} at about exp(+c) while the sum is
    # about exp(-c), c = (1 - a)(a^a s)^{1/(1-a)}; carry 2c digits of headroom
    c = (1 - a) * (a**a * s) ** (1 / (1 - a))
    extra = int(2 * c / mp.log(10)) + 20
    n_min = int(2 * s ** (1 / (1 - a))) + 20
    with mp.workdps(mp.mp.dps + extra):
        s = mp.mpf(s)
        total, n = mp.mpf(0), 0
        tol = mp.mpf(10) ** (-(mp.mp.dps))
        while True:
            term = (-s) ** n * mp.rgamma(n + 1) * mp.rgamma(1 - a - a * n)
            total += term
            # terms vanish at the poles of Gamma, so only stop past the peak
            if n > n_min and abs(term) < tol * abs(total):
                break
            n += 1
    return +total


def semigroup_kernel(beta, dim, r, s):
    if beta == 1:
        return (4 * mp.pi * s) ** (-mp.mpf(dim) / 2) * mp.exp(-(r**2) / (4 * s))
    # Poisson kernel of the half Laplacian
    n1 = mp.mpf(dim + 1) / 2
    return mp.gamma(n1) / mp.pi**n1 * s / (s**2 + r**2) ** n1


def profile_value(kind, a, beta, dim, r):
    with mp.workdps(30):
        a, r = mp.mpf(a), mp.mpf(r)
        beta = mp.mpf(beta)

        def integrand(s):
            weight = wright_m(a, s)
            if kind == "G":
                weight *= a * s
            return weight * semigroup_kernel(beta, dim, r, s)

        # M_a decays like exp(-c), c = (1 - a)(a^a s)^{1/(1-a)}; stop at c = 80
        s_max = (80 / (1 - a)) ** (1 - a) / a**a
        breaks = sorted(set([mp.mpf(0), r / 4, r, mp.mpf(1), mp.mpf(4), s_max / 4, s_max]))
        breaks = [x for x in breaks if x <= s_max]
        return mp.quad(integrand, breaks)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outfile")
    args = parser.parse_args()

    records = []
    for a, beta, dim in CASES:
        for kind in ("F", "G"):
            for r in RADII:
                if beta == 1.0 and r > 10:
                    continue
                value = profile_value(kind, a, beta, dim, r)
                records.append({"kind": kind, "alpha": a, "beta": beta, "dim": dim,
                                "r": r, "value": mp.nstr(value, 20)})
                print(kind, a, beta, dim, r, mp.nstr(value, 15), flush=True)

    with open(args.outfile, "w") as outf:
        json.dump({"records": records}, outf, indent=1)


if __name__ == "__main__":
    main()
