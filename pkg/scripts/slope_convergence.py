"""Goldstone slope: finite-difference estimate at the first lattice mode vs the closed form.

    python3 scripts/slope_convergence.py --sizes 250 500 1000 2000 4000
"""

import argparse
import math

from cjt.fluctuations import branch_dispersion, goldstone_slope
from cjt.meanfield import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000, 2000, 4000])
    ap.add_argument("--g", type=float, default=1.0)
    args = ap.parse_args()

    print(f"{'N':>6} {'finite diff':>16} {'closed form':>16} {'rel. error':>11}")
    for N in args.sizes:
        p = ModelParams.chain(Delta=1.0, t=0.5, omega_z=1.0, g=args.g, N=N)
        fd = branch_dispersion(p, k_grid=[1]).goldstone[0] / (2 * math.pi / N)
        cs = goldstone_slope(p)
        print(f"{N:>6} {fd:>16.12f} {cs:>16.12f} {abs(fd - cs) / cs:>11.3e}")


if __name__ == "__main__":
    main()
