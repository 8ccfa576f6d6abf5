"""Watch the radial minimizer on B_r climb toward rho as r grows.

For f = t (1 - t) the maximum approaches 1 from below when p <= 2.  At
p = 3 the growth condition at rho fails and the minimizer reaches rho
exactly on a core, so the gap column drops to zero.

Run ``python demos/ball_growth.py``.
"""

from plapsym.ball import minimize_radial
from plapsym.nonlinearity import NonlinearitySpec


def main():
    f = NonlinearitySpec.polynomial([0, 1, -1], 2)
    print(f"{'p':>4} {'r':>4} {'max u':>20} {'rho - max u':>12} {'start':>8}")
    for p in (1.5, 2.0, 3.0):
        for r in (5.0, 10.0, 20.0, 40.0):
            sol = minimize_radial(f, p, 2, 1.0, r, 1024)
            print(f"{p:4g} {r:4g} {sol.sup_norm:20.17f} {sol.gap:12.3e} {sol.start:>8}")


if __name__ == "__main__":
    main()
