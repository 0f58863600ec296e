"""Wigner function of |6> reconstructed from displaced photon statistics.

    python scripts/wigner_fock6.py --r 30 --step 0.1 --out runs/wigner

Writes the grid (reconstructed, exact, difference) as CSV and prints the worst
error in units of 2/pi. Pass several --r values to see the error shrink.
"""

import argparse
import csv
import math
import time
from pathlib import Path

from ramanfock import RamanParams, TruncatedFockSpace, fock_state
from ramanfock.protocols import reconstruct_wigner, square_grid


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--r", type=float, nargs="+", default=[30.0])
    parser.add_argument("--n", type=int, default=6, help="Fock state to reconstruct")
    parser.add_argument("--extent", type=float, default=3.5)
    parser.add_argument("--step", type=float, default=0.1)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", type=Path, default=Path("runs/wigner"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    field = fock_state(TruncatedFockSpace(args.n + 14), args.n)
    points = square_grid(args.extent, args.step)
    for r in args.r:
        params = RamanParams.from_hz(50e3, 50e3 / r, 1e6)
        start = time.perf_counter()
        grid = reconstruct_wigner(field, params, points, workers=args.workers)
        elapsed = time.perf_counter() - start
        path = args.out / f"wigner_n{args.n}_r{r:g}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re_alpha", "im_alpha", "w_reconstructed", "w_exact", "abs_diff"])
            for p in grid.points:
                diff = abs(p.w_reconstructed - p.w_exact)
                writer.writerow([f"{v:.12g}" for v in (p.alpha.real, p.alpha.imag, p.w_reconstructed, p.w_exact, diff)])
        err = grid.max_abs_error()
        print(f"r={r:g}: max |dW| = {err:.4g} = {err / (2 / math.pi):.4f} x 2/pi "
              f"(dim {grid.dim}, {len(points)} points, {elapsed:.1f}s) -> {path}")


if __name__ == "__main__":
    main()
