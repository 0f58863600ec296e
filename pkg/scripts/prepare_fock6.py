"""Conditional preparation of |6> from a coherent state with mean photon number 5.

Prints fidelity and success probability against the coupling ratio r and
writes the conditioned photon distribution for r = 30.

    python scripts/prepare_fock6.py --out runs/prepare_fock6
"""

import argparse
import csv
import math
from pathlib import Path

from ramanfock import RamanParams, TruncatedFockSpace, coherent_state
from ramanfock.protocols import prepare_fock, prepare_fock_sequential


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out", type=Path, default=Path("runs/prepare_fock6"))
    parser.add_argument("--ratios", type=float, nargs="+", default=[5, 10, 20, 30, 50, 100])
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    field = coherent_state(TruncatedFockSpace(40), math.sqrt(5))
    p5 = field.probabilities[5]
    print(f"P_5 = {p5:.6f}")
    print(f"{'r':>6} {'F(|6>)':>10} {'P_e':>10} {'F 2 atoms':>10} {'P 2 atoms':>10}")
    for r in args.ratios:
        params = RamanParams.from_hz(50e3, 50e3 / r, 1e6)
        one = prepare_fock(field, params, 5)
        two = prepare_fock_sequential(field, params, 5, 2)
        print(f"{r:6g} {one.fidelity:10.6f} {one.success_probability:10.6f} "
              f"{two.fidelity:10.6f} {two.success_probability:10.6f}")

    report = prepare_fock(field, RamanParams.from_hz(50e3, 50e3 / 30, 1e6), 5)
    with open(args.out / "distribution_r30.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "p_initial", "p_conditioned"])
        for n, (a, b) in enumerate(zip(field.probabilities, report.conditioned.state.probabilities)):
            writer.writerow([n, f"{a:.12g}", f"{b:.12g}"])
    print(f"wrote {args.out / 'distribution_r30.csv'}")


if __name__ == "__main__":
    main()
