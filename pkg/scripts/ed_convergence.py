"""Single-site exact diagonalization vs mean field as the boson cutoff grows.

Prints the ground energy, its ratio to the classical energy, the charge
commutator on the interior block and the Cartesian/chiral spectrum distance.

    python3 scripts/ed_convergence.py --g 2.0 --cutoffs 4 6 8 10 12 14
"""

import argparse

from cjt.ed_oracle import (
    TruncationSpec,
    build_hamiltonian,
    build_hamiltonian_chiral,
    commutator_norms,
    ground_state,
    low_spectrum,
    spectrum_distance,
)
from cjt.meanfield import ModelParams, classical_energy, solve_saddle_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--g", type=float, default=2.0)
    ap.add_argument("--omega-z", type=float, default=1.0)
    ap.add_argument("--Delta", type=float, default=1.0)
    ap.add_argument("--cutoffs", type=int, nargs="+", default=[4, 6, 8, 10, 12, 14])
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()

    p = ModelParams.chain(Delta=args.Delta, t=0.0, omega_z=args.omega_z, g=args.g, N=1)
    e_mf = classical_energy(p, solve_saddle_point(p))
    print(f"E_MF = {e_mf:.10f}")
    print(f"{'n_max':>5} {'dim':>5} {'E0':>16} {'E0/E_MF':>10} {'[H,C]':>9} {'cart-chiral':>11}")
    for n in args.cutoffs:
        trunc = TruncationSpec(n)
        hc = build_hamiltonian_chiral(p, trunc)
        e0 = ground_state(hc)[0]
        _, comm = commutator_norms(hc, trunc)
        dist = spectrum_distance(hc, build_hamiltonian(p, trunc))
        print(f"{n:>5} {trunc.dim:>5} {e0:>16.10f} {e0 / e_mf:>10.6f} {comm:>9.1e} {dist:>11.1e}")

    low = low_spectrum(hc, args.levels, trunc)
    print("lowest levels at the largest cutoff (energy, charge):")
    for e, c in zip(low.energies, low.charge_values):
        print(f"  {e:>14.10f}  {c:+.3f}")


if __name__ == "__main__":
    main()
