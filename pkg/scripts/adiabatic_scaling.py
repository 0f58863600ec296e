"""Full three-level model against the effective two-level model.

Integrates the time-dependent lambda-system Hamiltonian numerically and
compares the excited population with the closed-form effective evolution,
sweeping the detuning delta/g.

    python scripts/adiabatic_scaling.py --delta-over-g 20 40 80 160
"""

import argparse
import math
import time

from ramanfock import AtomLevel, JointState, RamanParams, TruncatedFockSpace, coherent_state, default_dim
from ramanfock.dynamics import analytic_propagate, numeric_propagate_full
from ramanfock.postselect import branch_probabilities, excited_probability
from ramanfock.raman import pi_time


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--delta-over-g", type=float, nargs="+", default=[20, 40, 80])
    parser.add_argument("--r", type=float, default=30.0)
    parser.add_argument("--n-o", type=int, default=5)
    args = parser.parse_args()

    alpha = math.sqrt(5)
    field = coherent_state(TruncatedFockSpace(default_dim(alpha, args.n_o + 1)), alpha)
    print(f"{'delta/g':>8} {'P_e full':>10} {'P_e eff':>10} {'|diff|':>10} {'P_h':>10} {'steps':>7} {'sec':>6}")
    for dg in args.delta_over_g:
        params = RamanParams.from_hz(50e3, 50e3 / args.r, 50e3 * dg)
        tau = pi_time(params, args.n_o)
        start = time.perf_counter()
        full = numeric_propagate_full(JointState.product(AtomLevel.G, field, 3), params, args.n_o, tau)
        elapsed = time.perf_counter() - start
        eff = analytic_propagate(JointState.product(AtomLevel.G, field, 2), params, args.n_o, tau)
        probs = branch_probabilities(full.state)
        pe = excited_probability(eff.state)
        print(f"{dg:8g} {probs[AtomLevel.E]:10.6f} {pe:10.6f} {abs(probs[AtomLevel.E] - pe):10.3e} "
              f"{probs[AtomLevel.H]:10.3e} {full.steps:7d} {elapsed:6.1f}")


if __name__ == "__main__":
    main()
