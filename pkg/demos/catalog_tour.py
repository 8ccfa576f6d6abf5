"""Classify a few nonlinearities and print their one-dimensional catalogs.

Run ``python demos/catalog_tour.py``.
"""

import math
import warnings

import numpy as np

from plapsym.classification import classify
from plapsym.nonlinearity import NonlinearitySpec
from plapsym.profile import build_profile

CASES = [
    ("t - t^3", [0, 1, 0, -1], 2.0),
    ("t (1 - t)", [0, 1, -1], 3.0),
    ("t - 1", [-1, 1], 1.5),
    ("(t - 1)(1 - 3t)", [-1, 4, -3], 2.0),
]


def main():
    for label, coeffs, p in CASES:
        f = NonlinearitySpec.polynomial(coeffs, 4)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cls = classify(f, p)
        zs = cls.zero_sets
        print(f"f = {label}, p = {p}: zeros {[round(z.z, 6) for z in zs.zf]}, "
              f"dominating {zs.zf_star}, Z_f0 {zs.zf0}, P_f {zs.pf}, flags {cls.flags}")
        for e in cls.entries:
            if e.kind == "Trivial":
                continue
            t_max = 10.0 if e.half_period is None else 2 * e.half_period
            prof = build_profile(f, p, e, t_max, 2049)
            extra = "" if e.half_period is None else f", t* = {e.half_period:.10f}"
            print(f"    {e.kind:<10} rho = {e.rho:g}, u'(0) = {e.slope0:.10f}{extra}, "
                  f"first-integral residual {prof.max_first_integral_residual:.1e}")
    f = NonlinearitySpec.polynomial([0, 1, 0, -1], 2)
    e = next(x for x in classify(f, 2).entries if x.kind == "Increasing")
    prof = build_profile(f, 2, e, 8.0, 4097)
    err = np.max(np.abs(prof.u - np.tanh(prof.t / math.sqrt(2))))
    print(f"front for t - t^3 vs tanh(t / sqrt 2): sup error {err:.2e}")


if __name__ == "__main__":
    main()
